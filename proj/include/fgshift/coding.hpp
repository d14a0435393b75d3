#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/measure.hpp"
#include "fgshift/pattern.hpp"
#include "fgshift/rational.hpp"
#include "fgshift/siteset.hpp"

namespace fgshift {

/// Recoding level: base alphabet K over the ball B(e, n); super-symbols are
/// the K-patterns on that ball, indexed canonically (site-major).
struct CodingLevel {
    GroupSpec spec;
    Alphabet alphabet;
    std::uint32_t n = 0;
    SiteSet ball_n;
    mpz_class super_size; // K^{|B(e, n)|}, possibly astronomical
};

inline mpz_class super_alphabet_count(const Alphabet& a, std::uint32_t n, const GroupSpec& spec) {
    validate_alphabet(a);
    mpz_class sites = ball_size_closed_form(spec, n);
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), mpz_class(a.size).get_mpz_t(), sites.get_ui());
    return out;
}

inline CodingLevel make_level(const GroupSpec& spec, const Alphabet& a, std::uint32_t n,
                              Budget& budget) {
    validate_spec(spec);
    validate_alphabet(a);
    CodingLevel lv;
    lv.spec = spec;
    lv.alphabet = a;
    lv.n = n;
    lv.ball_n = ball(spec, n, &budget);
    lv.super_size = pattern_space_size(lv.ball_n.size(), a);
    return lv;
}

// Super-symbol count when it is small enough to index; nullopt otherwise.
inline std::optional<std::uint32_t> super_count_u32(const CodingLevel& lv) {
    if (!lv.super_size.fits_ulong_p()) return std::nullopt;
    unsigned long c = lv.super_size.get_ui();
    if (c > 0xFFFFFFFFull) return std::nullopt;
    return static_cast<std::uint32_t>(c);
}

/// Materialized decode table: at(sym, i) is coordinate i of super-symbol sym
/// in ball order (coordinate 0 is the identity site).
class SymbolTable {
public:
    SymbolTable(std::uint32_t k, std::uint32_t width, Budget& budget) : k_(k), width_(width) {
        if (k > 0xFFFFu) throw invalid_input_error("alphabet too large for a symbol table");
        std::uint64_t total = charge_pattern_space(width, Alphabet{k}, budget);
        if (total > 0xFFFFFFFFull) throw budget_exceeded_error(budget.limit());
        count_ = static_cast<std::uint32_t>(total);
        value_.resize(static_cast<std::size_t>(count_) * width_);
        for (std::uint64_t sym = 0; sym < count_; ++sym) {
            std::uint64_t tmp = sym;
            for (std::uint32_t i = width_; i-- > 0;) {
                value_[sym * width_ + i] = static_cast<std::uint16_t>(tmp % k_);
                tmp /= k_;
            }
        }
    }

    std::uint32_t count() const { return count_; }
    std::uint32_t width() const { return width_; }
    std::uint16_t at(std::uint32_t sym, std::uint32_t i) const {
        return value_[static_cast<std::size_t>(sym) * width_ + i];
    }

private:
    std::uint32_t k_ = 0;
    std::uint32_t width_ = 0;
    std::uint32_t count_ = 0;
    std::vector<std::uint16_t> value_;
};

/// Ball recoding of a finite pattern: the super-symbol at g packs the values
/// on B(e, n) g, so the result lives on {g : B(e, n) g inside the domain}.
inline Pattern phi(const CodingLevel& lv, const Pattern& p, Budget& budget) {
    if (!super_count_u32(lv)) throw budget_exceeded_error(budget.limit());
    for (std::uint32_t v : p.values)
        if (v >= lv.alphabet.size) throw invalid_input_error("pattern symbol outside the alphabet");
    const std::uint64_t K = lv.alphabet.size;
    std::vector<Word> dom;
    std::vector<std::uint32_t> vals;
    for (std::size_t gi = 0; gi < p.domain.size(); ++gi) {
        budget.charge(lv.ball_n.size());
        std::uint64_t sym = 0;
        bool full = true;
        for (std::size_t fi = 0; fi < lv.ball_n.size(); ++fi) {
            auto pos = p.domain.find(mul(lv.ball_n[fi], p.domain[gi], lv.spec));
            if (!pos) {
                full = false;
                break;
            }
            sym = sym * K + p.values[*pos];
        }
        if (full) {
            dom.push_back(p.domain[gi]);
            vals.push_back(static_cast<std::uint32_t>(sym));
        }
    }
    return Pattern{SiteSet::from_sorted_unique(std::move(dom)), std::move(vals)};
}

/// Base-level readback: keep the identity coordinate of every super-symbol.
inline Pattern psi(const CodingLevel& lv, const Pattern& z) {
    std::uint64_t top = 1;
    for (std::size_t i = 1; i < lv.ball_n.size(); ++i) top *= lv.alphabet.size;
    std::vector<std::uint32_t> vals(z.values.size());
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        if (lv.super_size.fits_ulong_p() && z.values[i] >= lv.super_size.get_ui())
            throw invalid_input_error("super-symbol out of range");
        vals[i] = static_cast<std::uint32_t>(z.values[i] / top);
    }
    return Pattern{z.domain, std::move(vals)};
}

/// Empirical transition system of the recoded measure: pi is the exact
/// super-symbol distribution and P^t the exact conditional law of the symbol
/// one t-step away. Rows at pi-null states are set to the identity. The
/// result is validated before being returned, not assumed correct.
inline TransitionSystem markovize(const MeasureSpec& mu, const CodingLevel& lv, Budget& budget) {
    validate_measure(mu, lv.spec);
    if (mu.alphabet.size != lv.alphabet.size)
        throw invalid_input_error("measure alphabet does not match the coding level");
    auto count = super_count_u32(lv);
    if (!count) throw budget_exceeded_error(budget.limit());
    const std::uint32_t L = *count;
    const std::uint64_t K = lv.alphabet.size;

    TransitionSystem ts;
    ts.states = L;
    ts.pi = partition_distribution(mu, full_partition(lv.ball_n, lv.alphabet, budget), lv.spec,
                                   budget);
    ts.rows.resize(letter_count(lv.spec));
    for (Letter t = 0; t < letter_count(lv.spec); ++t) {
        Word step;
        step.letters.push_back(t);
        SiteSet u = union_sites(lv.ball_n, translate_sites(lv.ball_n, step, lv.spec));
        std::vector<std::size_t> pos_here(lv.ball_n.size()), pos_there(lv.ball_n.size());
        for (std::size_t i = 0; i < lv.ball_n.size(); ++i) {
            pos_here[i] = *u.find(lv.ball_n[i]);
            pos_there[i] = *u.find(mul(lv.ball_n[i], step, lv.spec));
        }
        std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> joint;
        for_each_weighted_pattern(
            mu, lv.spec, u, budget, [&](const std::vector<std::uint32_t>& v, const Rational& w) {
                std::uint64_t a = 0, b = 0;
                for (std::size_t i = 0; i < pos_here.size(); ++i) {
                    a = a * K + v[pos_here[i]];
                    b = b * K + v[pos_there[i]];
                }
                joint[{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)}] += w;
            });
        auto& mat = ts.rows[t];
        mat.resize(L);
        for (const auto& [ij, w] : joint) mat[ij.first].emplace_back(ij.second, w / ts.pi[ij.first]);
        for (std::uint32_t i = 0; i < L; ++i)
            if (sgn(ts.pi[i]) == 0) mat[i] = SparseRow{{i, Rational(1)}};
    }
    ValidationReport rep = validate_ts(ts, lv.spec);
    if (!rep.pass())
        throw error("markovized system failed validation: " +
                    (rep.failures.empty() ? std::string("unknown") : rep.failures.front()));
    return ts;
}

/// Depth-first walk over all state assignments of a geodesic tree that stay
/// on the positive support of csr. on_assign(site, state) may veto a branch;
/// on_leaf() fires per complete assignment. One budget unit per visited node.
template <class OnAssign, class OnLeaf>
void admissible_dfs(const TransitionCsr& csr, const ParentStructure& ps, std::size_t nsites,
                    std::vector<std::uint32_t>& values, Budget& budget, OnAssign&& on_assign,
                    OnLeaf&& on_leaf) {
    if (nsites == 0) {
        on_leaf();
        return;
    }
    struct Frame {
        const std::uint32_t* cur;
        const std::uint32_t* end;
    };
    std::vector<Frame> st(nsites);
    st[0] = {csr.roots.data(), csr.roots.data() + csr.roots.size()};
    std::size_t k = 0;
    while (true) {
        if (st[k].cur != st[k].end) {
            std::uint32_t v = *st[k].cur;
            budget.charge();
            values[k] = v;
            if (!on_assign(k, v)) {
                ++st[k].cur;
                continue;
            }
            if (k + 1 == nsites) {
                on_leaf();
                ++st[k].cur;
            } else {
                ++k;
                Letter t = ps.letter[k];
                const std::uint32_t* base = csr.col[t].data();
                std::uint32_t pv = values[ps.parent[k]];
                st[k] = {base + csr.off[t][pv], base + csr.off[t][pv + 1]};
            }
        } else {
            if (k == 0) return;
            --k;
            ++st[k].cur;
        }
    }
}

/// Is the pattern on the positive support of ts along every tree edge (and
/// at the root)? Domain must be a ball around the identity.
inline bool admissible(const Pattern& z, const TransitionSystem& ts, const GroupSpec& spec) {
    if (!is_ball(z.domain, spec)) throw invalid_input_error("domain is not a ball");
    for (std::uint32_t v : z.values)
        if (v >= ts.states) throw invalid_input_error("pattern symbol outside the state space");
    if (z.domain.empty()) return true;
    if (sgn(ts.pi[z.values[0]]) <= 0) return false;
    ParentStructure ps = parent_structure(z.domain, spec);
    for (std::size_t k = 1; k < z.domain.size(); ++k) {
        const Rational* q = find_entry(ts, ps.letter[k], z.values[ps.parent[k]], z.values[k]);
        if (q == nullptr || sgn(*q) <= 0) return false;
    }
    return true;
}

/// Redundant cross-check: test every adjacent pair of sites in both
/// directions instead of only the geodesic tree edges. Agrees with
/// admissible() whenever ts has reversible support.
inline bool admissible_all_pairs(const Pattern& z, const TransitionSystem& ts,
                                 const GroupSpec& spec) {
    if (!is_ball(z.domain, spec)) throw invalid_input_error("domain is not a ball");
    if (z.domain.empty()) return true;
    if (sgn(ts.pi[z.values[0]]) <= 0) return false;
    for (std::size_t i = 0; i < z.domain.size(); ++i)
        for (Letter t = 0; t < letter_count(spec); ++t) {
            auto j = z.domain.find(left_mul(t, z.domain[i], spec));
            if (!j) continue;
            const Rational* q = find_entry(ts, t, z.values[i], z.values[*j]);
            if (q == nullptr || sgn(*q) <= 0) return false;
        }
    return true;
}

template <class Fn>
void for_each_admissible(const TransitionSystem& ts, const SiteSet& domain, const GroupSpec& spec,
                         Budget& budget, Fn&& fn) {
    if (!is_ball(domain, spec)) throw invalid_input_error("domain is not a ball");
    TransitionCsr csr = make_csr(ts);
    ParentStructure ps = parent_structure(domain, spec);
    std::vector<std::uint32_t> values(domain.size());
    admissible_dfs(
        csr, ps, domain.size(), values, budget, [](std::size_t, std::uint32_t) { return true; },
        [&] { fn(static_cast<const std::vector<std::uint32_t>&>(values)); });
}

inline std::vector<Pattern> enumerate_admissible(const TransitionSystem& ts, const SiteSet& domain,
                                                 const GroupSpec& spec, Budget& budget) {
    std::vector<Pattern> out;
    for_each_admissible(ts, domain, spec, budget,
                        [&](const std::vector<std::uint32_t>& v) { out.push_back({domain, v}); });
    return out;
}

inline std::uint64_t count_admissible(const TransitionSystem& ts, const SiteSet& domain,
                                      const GroupSpec& spec, Budget& budget) {
    std::uint64_t n = 0;
    for_each_admissible(ts, domain, spec, budget, [&](const std::vector<std::uint32_t>&) { ++n; });
    return n;
}

/// Exhaustive readback check over admissible super-patterns: on each ball
/// B(e, m'), m' = 0..n, every admissible z must satisfy z(f)(e) = z(e)(f).
/// Counts and samples refer to the deepest radius reached; a violation at a
/// smaller radius always survives to the deeper ones (stochastic rows extend
/// any admissible pattern), so violations == 0 still certifies every radius.
struct ReconstructionReport {
    std::uint32_t level_n = 0;
    std::int64_t completed_radius = -1; // largest fully verified m'
    bool budget_exceeded = false;
    std::uint64_t patterns_checked = 0;
    std::uint64_t violations = 0;
    struct Sample {
        std::vector<std::uint32_t> z;
        std::uint32_t f_index;
    };
    std::vector<Sample> samples; // at most 8 violating patterns

    bool pass() const { return violations == 0 && !budget_exceeded; }
};

inline ReconstructionReport check_reconstruction_ts(const CodingLevel& lv,
                                                    const TransitionSystem& ts_super,
                                                    Budget& budget) {
    if (ts_super.states != super_count_u32(lv).value_or(0))
        throw invalid_input_error("transition system is not over the super-alphabet");
    ReconstructionReport rep;
    rep.level_n = lv.n;
    SymbolTable tbl(lv.alphabet.size, static_cast<std::uint32_t>(lv.ball_n.size()), budget);
    TransitionCsr csr = make_csr(ts_super);
    ParentStructure ps = parent_structure(lv.ball_n, lv.spec);
    std::vector<std::uint32_t> values(lv.ball_n.size());
    for (std::uint32_t m = 0; m <= lv.n; ++m) {
        std::size_t nsites = ball_size_closed_form(lv.spec, m).get_ui();
        rep.patterns_checked = 0;
        rep.violations = 0;
        rep.samples.clear();
        try {
            admissible_dfs(
                csr, ps, nsites, values, budget,
                [](std::size_t, std::uint32_t) { return true; },
                [&] {
                    ++rep.patterns_checked;
                    for (std::uint32_t fi = 0; fi < nsites; ++fi) {
                        if (tbl.at(values[fi], 0) != tbl.at(values[0], fi)) {
                            ++rep.violations;
                            if (rep.samples.size() < 8)
                                rep.samples.push_back(
                                    {std::vector<std::uint32_t>(values.begin(),
                                                                values.begin() + nsites),
                                     fi});
                            break;
                        }
                    }
                });
        } catch (const budget_exceeded_error&) {
            rep.budget_exceeded = true;
            return rep;
        }
        rep.completed_radius = m;
    }
    return rep;
}

inline ReconstructionReport check_reconstruction(const MeasureSpec& mu, const CodingLevel& lv,
                                                 Budget& budget) {
    return check_reconstruction_ts(lv, markovize(mu, lv, budget), budget);
}

/// Brute-force image of the recoding on B(e, m): recode every positive-
/// probability base pattern on B(e, m + n). Canonically sorted.
inline std::vector<std::vector<std::uint32_t>> image_oracle(const MeasureSpec& mu,
                                                            const CodingLevel& lv, std::uint32_t m,
                                                            Budget& budget) {
    if (!super_count_u32(lv)) throw budget_exceeded_error(budget.limit());
    SiteSet big = ball(lv.spec, m + lv.n, &budget);
    SiteSet small = ball(lv.spec, m, &budget);
    ParentStructure ps = parent_structure(big, lv.spec);
    TransitionCsr csr = measure_support_csr(mu, lv.spec);
    // positions of B(e, n) g inside the big ball, per g
    const std::uint64_t K = lv.alphabet.size;
    std::vector<std::vector<std::uint32_t>> window(small.size());
    for (std::size_t gi = 0; gi < small.size(); ++gi) {
        window[gi].resize(lv.ball_n.size());
        for (std::size_t fi = 0; fi < lv.ball_n.size(); ++fi)
            window[gi][fi] = *big.find(mul(lv.ball_n[fi], small[gi], lv.spec));
    }
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> values(big.size());
    std::vector<std::uint32_t> z(small.size());
    admissible_dfs(
        csr, ps, big.size(), values, budget, [](std::size_t, std::uint32_t) { return true; },
        [&] {
            budget.charge(small.size());
            for (std::size_t gi = 0; gi < small.size(); ++gi) {
                std::uint64_t sym = 0;
                for (std::uint32_t pos : window[gi]) sym = sym * K + values[pos];
                z[gi] = static_cast<std::uint32_t>(sym);
            }
            out.push_back(z);
        });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Count of positive-probability base patterns on a suffix-closed site set,
/// by exact dynamic programming up the geodesic tree (no enumeration).
inline mpz_class support_count_mpz(const TransitionCsr& csr, const ParentStructure& ps,
                                   std::size_t nsites) {
    if (nsites == 0) return 1;
    std::vector<std::vector<mpz_class>> f(nsites, std::vector<mpz_class>(csr.states, 1));
    for (std::size_t k = nsites; k-- > 1;) {
        Letter t = ps.letter[k];
        for (std::uint32_t i = 0; i < csr.states; ++i) {
            mpz_class sum = 0;
            for (std::uint32_t e = csr.off[t][i]; e < csr.off[t][i + 1]; ++e)
                sum += f[k][csr.col[t][e]];
            f[ps.parent[k]][i] *= sum;
        }
    }
    mpz_class total = 0;
    for (std::uint32_t r : csr.roots) total += f[0][r];
    return total;
}

/// Side-by-side count of admissible super-patterns on B(e, m) versus actual
/// recodings of positive-probability base patterns. in_image_count comes
/// from a streamed overlap-consistency test, image_count from an
/// independent tree count on B(e, m + n); the two must agree.
struct OracleCompareReport {
    std::uint32_t m = 0;
    std::uint64_t admissible_count = 0;
    std::uint64_t in_image_count = 0;
    mpz_class image_count = 0;
    bool equal = false;
    std::vector<std::vector<std::uint32_t>> missing_samples; // at most 4
    SiteSet domain;
};

inline OracleCompareReport oracle_compare(const MeasureSpec& mu, const CodingLevel& lv,
                                          std::uint32_t m, Budget& budget) {
    TransitionSystem ts_super = markovize(mu, lv, budget);
    OracleCompareReport rep;
    rep.m = m;
    SiteSet big = ball(lv.spec, m + lv.n, &budget);
    std::size_t nsmall = ball_size_closed_form(lv.spec, m).get_ui();
    rep.domain = SiteSet::from_sorted_unique(
        std::vector<Word>(big.words().begin(), big.words().begin() + nsmall));
    ParentStructure ps = parent_structure(big, lv.spec);

    TransitionCsr supp = measure_support_csr(mu, lv.spec);
    rep.image_count = support_count_mpz(supp, ps, big.size());
    if (rep.image_count > mpz_class(static_cast<unsigned long>(budget.limit())))
        throw budget_exceeded_error(budget.limit());

    SymbolTable tbl(lv.alphabet.size, static_cast<std::uint32_t>(lv.ball_n.size()), budget);
    // per letter t: coordinate pairs (f in child symbol, f t in parent symbol)
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs(letter_count(lv.spec));
    for (Letter t = 0; t < letter_count(lv.spec); ++t) {
        Word step;
        step.letters.push_back(t);
        for (std::size_t fi = 0; fi < lv.ball_n.size(); ++fi) {
            auto fj = lv.ball_n.find(mul(lv.ball_n[fi], step, lv.spec));
            if (fj) pairs[t].emplace_back(static_cast<std::uint32_t>(fi), *fj);
        }
    }

    TransitionCsr csr = make_csr(ts_super);
    std::vector<std::uint32_t> values(nsmall);
    admissible_dfs(
        csr, ps, nsmall, values, budget, [](std::size_t, std::uint32_t) { return true; },
        [&] { ++rep.admissible_count; });
    auto consistent = [&](std::size_t k, std::uint32_t v) {
        if (k == 0) return true;
        std::uint32_t pv = values[ps.parent[k]];
        for (const auto& [a, b] : pairs[ps.letter[k]])
            if (tbl.at(v, a) != tbl.at(pv, b)) return false;
        return true;
    };
    admissible_dfs(csr, ps, nsmall, values, budget, consistent, [&] { ++rep.in_image_count; });
    if (mpz_class(rep.in_image_count) != rep.image_count)
        throw error("recoding image count mismatch between streamed and tree oracles");
    rep.equal = rep.admissible_count == rep.in_image_count;

    if (!rep.equal && rep.admissible_count <= 100000) {
        std::vector<std::vector<std::uint32_t>> adm, img;
        admissible_dfs(
            csr, ps, nsmall, values, budget, [](std::size_t, std::uint32_t) { return true; },
            [&] { adm.push_back(values); });
        admissible_dfs(csr, ps, nsmall, values, budget, consistent,
                       [&] { img.push_back(values); });
        std::size_t j = 0;
        for (const auto& z : adm) {
            while (j < img.size() && img[j] < z) ++j;
            if (j < img.size() && img[j] == z) continue;
            rep.missing_samples.push_back(z);
            if (rep.missing_samples.size() == 4) break;
        }
    }
    return rep;
}

} // namespace fgshift
