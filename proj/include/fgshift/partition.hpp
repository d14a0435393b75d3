#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/pattern.hpp"
#include "fgshift/siteset.hpp"

namespace fgshift {

/// A finite partition of K^G presented on a finite window: labels[i] is the
/// cell of the window pattern with canonical index i. Labels are dense and
/// surjective onto 0..label_count-1.
struct WindowPartition {
    Alphabet alphabet;
    SiteSet window;
    std::vector<std::uint32_t> labels;
    std::uint32_t label_count = 0;
};

inline void validate_partition(const WindowPartition& p) {
    validate_alphabet(p.alphabet);
    mpz_class expect = pattern_space_size(p.window.size(), p.alphabet);
    if (expect != static_cast<unsigned long>(p.labels.size()))
        throw invalid_input_error("partition labeling is not total on the window patterns");
    if (p.label_count == 0) throw invalid_input_error("partition needs at least one label");
    std::vector<bool> seen(p.label_count, false);
    for (std::uint32_t l : p.labels) {
        if (l >= p.label_count) throw invalid_input_error("partition label out of range");
        seen[l] = true;
    }
    for (bool s : seen)
        if (!s) throw invalid_input_error("partition labeling is not surjective");
}

/// The full K-ary partition of a window: every pattern its own cell.
inline WindowPartition full_partition(const SiteSet& window, const Alphabet& k, Budget& budget) {
    validate_alphabet(k);
    std::uint64_t total = charge_pattern_space(window.size(), k, budget);
    if (total > 0xFFFFFFFFull) throw budget_exceeded_error(budget.limit());
    WindowPartition out{k, window, std::vector<std::uint32_t>(total), static_cast<std::uint32_t>(total)};
    for (std::uint64_t i = 0; i < total; ++i) out.labels[i] = static_cast<std::uint32_t>(i);
    return out;
}

/// The coordinate partition at the identity: cells are the symbol values there.
inline WindowPartition alpha_partition(const Alphabet& k, Budget& budget) {
    return full_partition(SiteSet({Word{}}), k, budget);
}

/// Common refinement. Distinct labels for the (P,Q) label pairs actually
/// realized, numbered in order of first appearance along the canonical
/// pattern enumeration of the union window.
inline WindowPartition join(const WindowPartition& p, const WindowPartition& q, Budget& budget) {
    if (p.alphabet != q.alphabet) throw invalid_input_error("join requires a common alphabet");
    const std::uint64_t k = p.alphabet.size;
    SiteSet window = union_sites(p.window, q.window);
    const std::uint64_t total = charge_pattern_space(window.size(), p.alphabet, budget);
    if (total > 0xFFFFFFFFull) throw budget_exceeded_error(budget.limit());

    auto positions = [&](const SiteSet& w) {
        std::vector<std::size_t> pos(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) pos[i] = *window.find(w[i]);
        return pos;
    };
    const std::vector<std::size_t> pp = positions(p.window);
    const std::vector<std::size_t> qp = positions(q.window);

    WindowPartition out{p.alphabet, window, std::vector<std::uint32_t>(total), 0};
    std::unordered_map<std::uint64_t, std::uint32_t> pair_label;
    std::vector<std::uint32_t> v(window.size(), 0);
    std::uint64_t idx = 0;
    for (;;) {
        std::uint64_t ip = 0, iq = 0;
        for (std::size_t pos : pp) ip = ip * k + v[pos];
        for (std::size_t pos : qp) iq = iq * k + v[pos];
        std::uint64_t key = static_cast<std::uint64_t>(p.labels[ip]) * q.label_count + q.labels[iq];
        auto [it, fresh] =
            pair_label.try_emplace(key, static_cast<std::uint32_t>(pair_label.size()));
        (void)fresh;
        out.labels[idx] = it->second;

        ++idx;
        std::size_t i = v.size();
        while (i > 0) {
            if (++v[i - 1] < k) break;
            v[i - 1] = 0;
            --i;
        }
        if (i == 0) break;
    }
    out.label_count = static_cast<std::uint32_t>(pair_label.size());
    return out;
}

/// Window moves to W*g; cells follow their patterns. label_count is
/// preserved (translation permutes patterns bijectively).
inline WindowPartition translate_partition(const WindowPartition& p, const Word& g,
                                           const GroupSpec& spec, Budget& budget) {
    const std::uint64_t k = p.alphabet.size;
    SiteSet window = translate_sites(p.window, g, spec);
    if (window.size() != p.window.size())
        throw invalid_input_error("translation collapsed the partition window");
    const std::uint64_t total = charge_pattern_space(window.size(), p.alphabet, budget);

    std::vector<std::size_t> perm(p.window.size()); // old site i sits at perm[i] in the new window
    for (std::size_t i = 0; i < p.window.size(); ++i)
        perm[i] = *window.find(mul(p.window[i], g, spec));

    WindowPartition out{p.alphabet, window, std::vector<std::uint32_t>(total), p.label_count};
    std::vector<std::uint32_t> v(window.size(), 0);
    std::uint64_t idx = 0;
    for (;;) {
        std::uint64_t old_idx = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) old_idx = old_idx * k + v[perm[i]];
        out.labels[idx] = p.labels[old_idx];

        ++idx;
        std::size_t i = v.size();
        while (i > 0) {
            if (++v[i - 1] < k) break;
            v[i - 1] = 0;
            --i;
        }
        if (i == 0) break;
    }
    return out;
}

/// The rank-one binary window partition on {a^j : |j| <= n, j != n-1}: 2n
/// fair coordinates with the slot just below a^n deliberately missing.
inline WindowPartition pn_partition(std::uint32_t n, Budget& budget) {
    if (n < 1) throw invalid_input_error("pn_partition requires n >= 1");
    std::vector<Word> sites;
    for (std::int64_t j = -static_cast<std::int64_t>(n); j <= static_cast<std::int64_t>(n); ++j) {
        if (j == static_cast<std::int64_t>(n) - 1) continue;
        Word w;
        w.letters.assign(static_cast<std::size_t>(j < 0 ? -j : j),
                         static_cast<Letter>(j < 0 ? 1 : 0));
        sites.push_back(std::move(w));
    }
    return full_partition(SiteSet(std::move(sites)), Alphabet{2}, budget);
}

/// The ball-join tower over a single-site partition: join of the translates
/// of alpha by every g in B(e,n). Window is exactly B(e,n).
inline WindowPartition alpha_join_over_ball(const WindowPartition& alpha, std::uint32_t n,
                                            const GroupSpec& spec, Budget& budget) {
    if (alpha.window.size() != 1 || !alpha.window[0].empty())
        throw invalid_input_error("ball join requires a partition with window {e}");
    SiteSet b = ball(spec, n, &budget);
    WindowPartition acc = alpha;
    for (std::size_t i = 1; i < b.size(); ++i)
        acc = join(acc, translate_partition(alpha, b[i], spec, budget), budget);
    return acc;
}

} // namespace fgshift
