#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"

namespace fgshift {

/// An immutable finite set of reduced words in canonical shortlex order.
/// Copies are cheap (shared storage); the index map makes membership and
/// position lookups O(1).
class SiteSet {
public:
    SiteSet() : impl_(empty_impl()) {}

    explicit SiteSet(std::vector<Word> sites) {
        std::sort(sites.begin(), sites.end(), shortlex_less);
        sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
        impl_ = make_impl(std::move(sites));
    }

    static SiteSet from_sorted_unique(std::vector<Word> sites) {
        SiteSet s;
        s.impl_ = make_impl(std::move(sites));
        return s;
    }

    std::size_t size() const noexcept { return impl_->sites.size(); }
    bool empty() const noexcept { return impl_->sites.empty(); }
    const Word& operator[](std::size_t i) const { return impl_->sites[i]; }
    const std::vector<Word>& words() const noexcept { return impl_->sites; }

    std::optional<std::uint32_t> find(const Word& w) const {
        auto it = impl_->index.find(w);
        if (it == impl_->index.end()) return std::nullopt;
        return it->second;
    }
    bool contains(const Word& w) const { return impl_->index.count(w) != 0; }

    friend bool operator==(const SiteSet& a, const SiteSet& b) {
        return a.impl_ == b.impl_ || a.impl_->sites == b.impl_->sites;
    }

private:
    struct Impl {
        std::vector<Word> sites;
        std::unordered_map<Word, std::uint32_t, WordHash> index;
    };

    static std::shared_ptr<const Impl> make_impl(std::vector<Word> sites) {
        auto impl = std::make_shared<Impl>();
        impl->sites = std::move(sites);
        impl->index.reserve(impl->sites.size());
        for (std::uint32_t i = 0; i < impl->sites.size(); ++i)
            impl->index.emplace(impl->sites[i], i);
        return impl;
    }

    static std::shared_ptr<const Impl> empty_impl() {
        static const std::shared_ptr<const Impl> e = std::make_shared<Impl>();
        return e;
    }

    std::shared_ptr<const Impl> impl_;
};

/// |B(e,n)| from the closed-form counts.
inline mpz_class ball_size_closed_form(const GroupSpec& spec, std::uint32_t n) {
    mpz_class size;
    if (spec.mode == GroupMode::group) {
        if (spec.rank == 1) {
            size = 2 * mpz_class(n) + 1;
        } else {
            mpz_class q = 2 * mpz_class(spec.rank) - 1;
            mpz_class qn;
            mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), n);
            size = 1 + 2 * mpz_class(spec.rank) * (qn - 1) / (q - 1);
        }
    } else {
        if (spec.rank == 1) {
            size = mpz_class(n) + 1;
        } else {
            mpz_class rn;
            mpz_pow_ui(rn.get_mpz_t(), mpz_class(spec.rank).get_mpz_t(), n + 1);
            size = (rn - 1) / (spec.rank - 1);
        }
    }
    return size;
}

/// B(e,n) = all reduced words of length <= n, in shortlex order. The builder
/// appends letters on the right level by level, which yields shortlex order
/// directly.
inline SiteSet ball(const GroupSpec& spec, std::uint32_t n, Budget* budget = nullptr) {
    validate_spec(spec);
    mpz_class total = ball_size_closed_form(spec, n);
    if (budget != nullptr) {
        if (!total.fits_ulong_p()) throw budget_exceeded_error(budget->limit());
        budget->charge(total.get_ui());
    }
    std::vector<Word> sites;
    sites.emplace_back();
    std::size_t level_begin = 0, level_end = 1;
    for (std::uint32_t depth = 0; depth < n; ++depth) {
        for (std::size_t i = level_begin; i < level_end; ++i) {
            for (Letter t = 0; t < letter_count(spec); ++t) {
                const Word& w = sites[i];
                if (spec.mode == GroupMode::group && !w.letters.empty() &&
                    w.letters.back() == (t ^ 1u))
                    continue;
                Word child = w;
                child.letters.push_back(t);
                sites.push_back(std::move(child));
            }
        }
        level_begin = level_end;
        level_end = sites.size();
    }
    return SiteSet::from_sorted_unique(std::move(sites));
}

/// (f_1, ..., f_{m+1}) with f_1 = f, f_{m+1} = e, and f_{i} obtained from
/// f_{i+1} by one left letter multiplication.
inline std::vector<Word> geodesic_suffixes(const Word& f) {
    std::vector<Word> out;
    out.reserve(f.length() + 1);
    for (std::size_t i = 0; i <= f.length(); ++i) {
        Word suffix;
        suffix.letters.assign(f.letters.begin() + static_cast<std::ptrdiff_t>(i),
                              f.letters.end());
        out.push_back(std::move(suffix));
    }
    return out;
}

/// B(f,n) = B(e,n) f, all products reduced.
inline SiteSet left_ball(const Word& f, std::uint32_t n, const GroupSpec& spec) {
    SiteSet b = ball(spec, n);
    std::vector<Word> sites;
    sites.reserve(b.size());
    for (const Word& g : b.words()) sites.push_back(mul(g, f, spec));
    return SiteSet(std::move(sites));
}

inline SiteSet translate_sites(const SiteSet& sites, const Word& g, const GroupSpec& spec) {
    std::vector<Word> out;
    out.reserve(sites.size());
    for (const Word& w : sites.words()) out.push_back(mul(w, g, spec));
    return SiteSet(std::move(out));
}

inline SiteSet union_sites(const SiteSet& a, const SiteSet& b) {
    std::vector<Word> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.words().begin(), a.words().end());
    out.insert(out.end(), b.words().begin(), b.words().end());
    return SiteSet(std::move(out));
}

/// Closure under the parent map w -> w without its first letter. Every ball
/// is suffix-closed; closures let tree-Markov marginals run on exactly the
/// sites they need.
inline SiteSet suffix_closure(const std::vector<Word>& words) {
    std::vector<Word> out;
    for (const Word& w : words) {
        for (std::size_t i = 0; i <= w.length(); ++i) {
            Word suffix;
            suffix.letters.assign(w.letters.begin() + static_cast<std::ptrdiff_t>(i),
                                  w.letters.end());
            out.push_back(std::move(suffix));
        }
    }
    return SiteSet(std::move(out));
}

inline SiteSet suffix_closure(const SiteSet& sites) { return suffix_closure(sites.words()); }

inline bool is_suffix_closed(const SiteSet& sites) {
    for (const Word& w : sites.words()) {
        if (w.empty()) continue;
        Word parent;
        parent.letters.assign(w.letters.begin() + 1, w.letters.end());
        if (!sites.contains(parent)) return false;
    }
    return !sites.empty() ? sites.contains(Word{}) : true;
}

/// The spanning tree of a suffix-closed site set rooted at e: site k > 0 with
/// word t_1 ... t_m has parent t_2 ... t_m and edge letter t_1, i.e.
/// site = letter * parent.
struct ParentStructure {
    std::vector<std::uint32_t> parent; // parent[0] is unused
    std::vector<Letter> letter;        // letter[0] is unused
};

inline ParentStructure parent_structure(const SiteSet& sites, const GroupSpec& spec) {
    validate_spec(spec);
    if (sites.empty() || !sites[0].empty())
        throw invalid_input_error("malformed ball: identity element missing");
    ParentStructure ps;
    ps.parent.resize(sites.size(), 0);
    ps.letter.resize(sites.size(), 0);
    for (std::uint32_t k = 1; k < sites.size(); ++k) {
        const Word& w = sites[k];
        Word parent;
        parent.letters.assign(w.letters.begin() + 1, w.letters.end());
        auto idx = sites.find(parent);
        if (!idx)
            throw invalid_input_error("malformed ball: not closed under geodesic suffixes");
        ps.parent[k] = *idx;
        ps.letter[k] = w.letters.front();
        check_letter(ps.letter[k], spec);
    }
    return ps;
}

inline bool is_ball(const SiteSet& sites, const GroupSpec& spec) {
    if (sites.empty()) return false;
    std::uint32_t n = 0;
    for (const Word& w : sites.words()) n = std::max<std::uint32_t>(n, static_cast<std::uint32_t>(w.length()));
    mpz_class expect = ball_size_closed_form(spec, n);
    if (expect != static_cast<unsigned long>(sites.size())) return false;
    return sites == ball(spec, n);
}

} // namespace fgshift
