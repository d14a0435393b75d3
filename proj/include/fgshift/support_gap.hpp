#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/coding.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/measure.hpp"
#include "fgshift/pattern.hpp"
#include "fgshift/rational.hpp"
#include "fgshift/siteset.hpp"

namespace fgshift {

/// Sliding-block code: the target symbol at g is table[idx] where idx packs
/// the source values on (window) g in canonical window order.
struct GeneralCode {
    SiteSet window;
    Alphabet source;
    Alphabet target;
    std::vector<std::uint32_t> table; // size source^{|window|}
};

inline void validate_code(const GeneralCode& code) {
    validate_alphabet(code.source);
    validate_alphabet(code.target);
    if (code.window.empty()) throw invalid_input_error("code window is empty");
    mpz_class total = pattern_space_size(code.window.size(), code.source);
    if (!total.fits_ulong_p() || total.get_ui() != code.table.size())
        throw invalid_input_error("code table size does not match the window");
    for (std::uint32_t v : code.table)
        if (v >= code.target.size)
            throw invalid_input_error("code table entry outside the target alphabet");
}

inline GeneralCode identity_code(const Alphabet& a) {
    GeneralCode c;
    c.window = SiteSet(std::vector<Word>{Word{}});
    c.source = a;
    c.target = a;
    c.table.resize(a.size);
    std::iota(c.table.begin(), c.table.end(), 0u);
    return c;
}

/// The ball recoding of a level, seen as a sliding-block code.
inline GeneralCode code_of_level(const CodingLevel& lv, Budget& budget) {
    auto L = super_count_u32(lv);
    if (!L) throw budget_exceeded_error(budget.limit());
    budget.charge(*L);
    GeneralCode c;
    c.window = lv.ball_n;
    c.source = lv.alphabet;
    c.target = Alphabet{*L};
    c.table.resize(*L);
    std::iota(c.table.begin(), c.table.end(), 0u);
    return c;
}

inline Pattern apply_code(const GeneralCode& code, const Pattern& p, const GroupSpec& spec,
                          Budget& budget) {
    validate_code(code);
    for (std::uint32_t v : p.values)
        if (v >= code.source.size)
            throw invalid_input_error("pattern symbol outside the code's source alphabet");
    const std::uint64_t K = code.source.size;
    std::vector<Word> dom;
    std::vector<std::uint32_t> vals;
    for (std::size_t gi = 0; gi < p.domain.size(); ++gi) {
        budget.charge(code.window.size());
        std::uint64_t idx = 0;
        bool full = true;
        for (std::size_t wi = 0; wi < code.window.size(); ++wi) {
            auto pos = p.domain.find(mul(code.window[wi], p.domain[gi], spec));
            if (!pos) {
                full = false;
                break;
            }
            idx = idx * K + p.values[*pos];
        }
        if (full) {
            dom.push_back(p.domain[gi]);
            vals.push_back(code.table[idx]);
        }
    }
    return Pattern{SiteSet::from_sorted_unique(std::move(dom)), std::move(vals)};
}

/// Exact level-0 pair statistics of the coded process: stationary symbol
/// law pi and one-step conditionals per letter; identity rows at pi-null
/// symbols. Validated before being returned.
inline TransitionSystem pushforward_ts(const MeasureSpec& mu, const GeneralCode& code,
                                       const GroupSpec& spec, Budget& budget) {
    validate_measure(mu, spec);
    validate_code(code);
    if (code.source.size != mu.alphabet.size)
        throw invalid_input_error("code source alphabet does not match the measure");
    const std::uint64_t K = mu.alphabet.size;
    TransitionSystem ts;
    ts.states = code.target.size;

    WindowPartition pw;
    pw.alphabet = code.source;
    pw.window = code.window;
    pw.labels = code.table;
    pw.label_count = code.target.size;
    ts.pi = partition_distribution(mu, pw, spec, budget);

    ts.rows.resize(letter_count(spec));
    for (Letter t = 0; t < letter_count(spec); ++t) {
        Word step;
        step.letters.push_back(t);
        SiteSet u = union_sites(code.window, translate_sites(code.window, step, spec));
        SiteSet iter = mu.kind == MeasureSpec::Kind::bernoulli ? u : suffix_closure(u);
        std::vector<std::size_t> pos_here(code.window.size()), pos_there(code.window.size());
        for (std::size_t i = 0; i < code.window.size(); ++i) {
            pos_here[i] = *iter.find(code.window[i]);
            pos_there[i] = *iter.find(mul(code.window[i], step, spec));
        }
        std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> joint;
        for_each_weighted_pattern(
            mu, spec, iter, budget, [&](const std::vector<std::uint32_t>& v, const Rational& w) {
                std::uint64_t a = 0, b = 0;
                for (std::size_t i = 0; i < pos_here.size(); ++i) {
                    a = a * K + v[pos_here[i]];
                    b = b * K + v[pos_there[i]];
                }
                joint[{code.table[a], code.table[b]}] += w;
            });
        auto& mat = ts.rows[t];
        mat.resize(ts.states);
        for (const auto& [ij, w] : joint) mat[ij.first].emplace_back(ij.second, w / ts.pi[ij.first]);
        for (std::uint32_t i = 0; i < ts.states; ++i)
            if (sgn(ts.pi[i]) == 0) mat[i] = SparseRow{{i, Rational(1)}};
    }
    ValidationReport rep = validate_ts(ts, spec);
    if (!rep.pass())
        throw error("pushforward system failed validation: " +
                    (rep.failures.empty() ? std::string("unknown") : rep.failures.front()));
    return ts;
}

/// First level m <= m_max (if any) at which some pattern admissible for the
/// coded pair statistics is not an actual recoding of a positive-probability
/// source pattern. The witness is the canonically first such pattern.
struct GapReport {
    bool found = false;
    std::uint32_t m = 0; // gap level when found, else m_max
    SiteSet domain;      // B(e, m) at the reported level
    std::vector<std::uint32_t> witness;
    std::uint64_t admissible_count = 0; // at the reported level
    std::uint64_t image_count = 0;
    std::uint32_t m_examined = 0; // last level examined
    TransitionSystem ts;          // coded pair statistics (level 0)
};

inline GapReport support_gap_search(const MeasureSpec& mu, const GeneralCode& code,
                                    const GroupSpec& spec, std::uint32_t m_max, Budget& budget) {
    GapReport rep;
    rep.ts = pushforward_ts(mu, code, spec, budget);
    const std::uint64_t K = mu.alphabet.size;
    for (std::uint32_t m = 0; m <= m_max; ++m) {
        SiteSet dom = ball(spec, m, &budget);
        std::vector<Word> usites;
        for (std::size_t gi = 0; gi < dom.size(); ++gi)
            for (std::size_t wi = 0; wi < code.window.size(); ++wi)
                usites.push_back(mul(code.window[wi], dom[gi], spec));
        SiteSet u(std::move(usites));
        SiteSet iter = mu.kind == MeasureSpec::Kind::bernoulli ? u : suffix_closure(u);
        std::vector<std::vector<std::size_t>> pos(dom.size());
        for (std::size_t gi = 0; gi < dom.size(); ++gi) {
            pos[gi].resize(code.window.size());
            for (std::size_t wi = 0; wi < code.window.size(); ++wi)
                pos[gi][wi] = *iter.find(mul(code.window[wi], dom[gi], spec));
        }
        std::set<std::vector<std::uint32_t>> image;
        std::vector<std::uint32_t> z(dom.size());
        for_each_weighted_pattern(mu, spec, iter, budget,
                                  [&](const std::vector<std::uint32_t>& v, const Rational&) {
                                      for (std::size_t gi = 0; gi < dom.size(); ++gi) {
                                          std::uint64_t idx = 0;
                                          for (std::size_t p : pos[gi]) idx = idx * K + v[p];
                                          z[gi] = code.table[idx];
                                      }
                                      image.insert(z);
                                  });
        rep.admissible_count = 0;
        bool found = false;
        std::vector<std::uint32_t> witness;
        for_each_admissible(rep.ts, dom, spec, budget,
                            [&](const std::vector<std::uint32_t>& zv) {
                                ++rep.admissible_count;
                                if (!found && image.find(zv) == image.end()) {
                                    found = true;
                                    witness = zv;
                                }
                            });
        rep.image_count = image.size();
        rep.m_examined = m;
        rep.m = m;
        rep.domain = dom;
        if (found) {
            rep.found = true;
            rep.witness = std::move(witness);
            return rep;
        }
    }
    return rep;
}

/// Exhaustive preimage search for a coded pattern on B(e, m): every source
/// pattern on the union of code windows over the ball, then on every larger
/// ball of at most max_sites sites, measure ignored. preimage_found means
/// some candidate recodes to the witness.
struct PreimageCheck {
    bool preimage_found = false;
    std::uint64_t candidates = 0;
    std::uint32_t max_sites_used = 0;
};

inline PreimageCheck verify_no_preimage(const GeneralCode& code, const GroupSpec& spec,
                                        const SiteSet& domain,
                                        const std::vector<std::uint32_t>& witness,
                                        std::uint32_t max_sites, Budget& budget) {
    validate_code(code);
    if (witness.size() != domain.size())
        throw invalid_input_error("witness length does not match the domain");
    const std::uint64_t K = code.source.size;
    std::vector<Word> usites;
    for (std::size_t gi = 0; gi < domain.size(); ++gi)
        for (std::size_t wi = 0; wi < code.window.size(); ++wi)
            usites.push_back(mul(code.window[wi], domain[gi], spec));
    SiteSet u(std::move(usites));

    PreimageCheck chk;
    auto scan = [&](const SiteSet& sites) {
        chk.max_sites_used = std::max<std::uint32_t>(chk.max_sites_used,
                                                     static_cast<std::uint32_t>(sites.size()));
        std::vector<std::vector<std::size_t>> pos(domain.size());
        for (std::size_t gi = 0; gi < domain.size(); ++gi) {
            pos[gi].resize(code.window.size());
            for (std::size_t wi = 0; wi < code.window.size(); ++wi)
                pos[gi][wi] = *sites.find(mul(code.window[wi], domain[gi], spec));
        }
        for_each_pattern(sites, code.source, budget, [&](const std::vector<std::uint32_t>& v) {
            ++chk.candidates;
            for (std::size_t gi = 0; gi < domain.size(); ++gi) {
                std::uint64_t idx = 0;
                for (std::size_t p : pos[gi]) idx = idx * K + v[p];
                if (code.table[idx] != witness[gi]) return;
            }
            chk.preimage_found = true;
        });
    };
    scan(u);
    for (std::uint32_t r = 0;; ++r) {
        mpz_class sz = ball_size_closed_form(spec, r);
        if (sz > max_sites) break;
        SiteSet b = ball(spec, r, &budget);
        bool covers = true;
        for (std::size_t i = 0; i < u.size() && covers; ++i) covers = b.contains(u[i]);
        if (covers) scan(b);
    }
    return chk;
}

} // namespace fgshift
