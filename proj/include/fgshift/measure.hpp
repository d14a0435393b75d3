#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/partition.hpp"
#include "fgshift/pattern.hpp"
#include "fgshift/rational.hpp"
#include "fgshift/siteset.hpp"

namespace fgshift {

/// Sparse stochastic row: (column, probability) sorted by column, zeros
/// omitted. Exact rationals throughout so support questions are decidable.
using SparseRow = std::vector<std::pair<std::uint32_t, Rational>>;

/// Per-letter stochastic matrices with a common stationary vector pi. In
/// group mode there is one matrix per letter (generators and inverses); in
/// semigroup mode one per generator.
struct TransitionSystem {
    std::uint32_t states = 0;
    std::vector<Rational> pi;
    std::vector<std::vector<SparseRow>> rows; // [letter][state]
};

inline const Rational* find_entry(const TransitionSystem& ts, Letter t, std::uint32_t i,
                                  std::uint32_t j) {
    const SparseRow& row = ts.rows[t][i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, std::uint32_t col) { return e.first < col; });
    if (it == row.end() || it->first != j) return nullptr;
    return &it->second;
}

inline Rational transition(const TransitionSystem& ts, Letter t, std::uint32_t i,
                           std::uint32_t j) {
    const Rational* q = find_entry(ts, t, i, j);
    return q ? *q : Rational(0);
}

/// Build from dense per-letter matrices; keeps nonzero entries (including
/// negative ones, so validation can still see them).
inline TransitionSystem ts_from_dense(std::vector<Rational> pi,
                                      const std::vector<std::vector<std::vector<Rational>>>& mats) {
    TransitionSystem ts;
    ts.states = static_cast<std::uint32_t>(pi.size());
    ts.pi = std::move(pi);
    ts.rows.resize(mats.size());
    for (std::size_t t = 0; t < mats.size(); ++t) {
        if (mats[t].size() != ts.states)
            throw invalid_input_error("transition matrix row count does not match the state count");
        ts.rows[t].resize(ts.states);
        for (std::uint32_t i = 0; i < ts.states; ++i) {
            if (mats[t][i].size() != ts.states)
                throw invalid_input_error("transition matrix is not square");
            for (std::uint32_t j = 0; j < ts.states; ++j)
                if (sgn(mats[t][i][j]) != 0) ts.rows[t][i].emplace_back(j, mats[t][i][j]);
        }
    }
    return ts;
}

struct ValidationReport {
    bool stochastic = true;
    bool stationary = true;
    bool reversible = true; // vacuously true in semigroup mode
    std::vector<std::string> failures; // first offending index per failed check

    bool pass() const { return stochastic && stationary && reversible; }
};

/// Stochasticity, stationarity pi P^s = pi and, in group mode, reversibility
/// pi_i P^s_ij = pi_j P^{s^-1}_ji. Dimension problems throw; property
/// violations are reported.
inline ValidationReport validate_ts(const TransitionSystem& ts, const GroupSpec& spec) {
    validate_spec(spec);
    if (ts.pi.size() != ts.states)
        throw invalid_input_error("pi length does not match the state count");
    if (ts.rows.size() != letter_count(spec))
        throw invalid_input_error("expected one transition matrix per generator letter");
    for (const auto& mat : ts.rows) {
        if (mat.size() != ts.states)
            throw invalid_input_error("transition matrix row count does not match the state count");
        for (const SparseRow& row : mat)
            for (const auto& [j, q] : row) {
                (void)q;
                if (j >= ts.states)
                    throw invalid_input_error("transition matrix column out of range");
            }
    }

    ValidationReport rep;
    auto fail = [&](bool& flag, std::string msg) {
        if (flag) rep.failures.push_back(std::move(msg));
        flag = false;
    };

    Rational pi_sum = 0;
    for (std::uint32_t i = 0; i < ts.states; ++i) {
        if (sgn(ts.pi[i]) < 0) fail(rep.stochastic, "pi[" + std::to_string(i) + "] is negative");
        pi_sum += ts.pi[i];
    }
    if (rep.stochastic && pi_sum != 1) fail(rep.stochastic, "pi does not sum to 1");
    for (std::size_t t = 0; t < ts.rows.size() && rep.stochastic; ++t) {
        for (std::uint32_t i = 0; i < ts.states; ++i) {
            Rational sum = 0;
            bool neg = false;
            for (const auto& [j, q] : ts.rows[t][i]) {
                (void)j;
                if (sgn(q) < 0) neg = true;
                sum += q;
            }
            if (neg || sum != 1) {
                fail(rep.stochastic, "row " + std::to_string(i) + " of P^" +
                                         std::string(1, letter_name(static_cast<Letter>(t), spec)) +
                                         " is not a probability vector");
                break;
            }
        }
    }

    for (std::size_t t = 0; t < ts.rows.size() && rep.stationary; ++t) {
        std::vector<Rational> sigma(ts.states, Rational(0));
        for (std::uint32_t i = 0; i < ts.states; ++i)
            for (const auto& [j, q] : ts.rows[t][i]) sigma[j] += ts.pi[i] * q;
        for (std::uint32_t j = 0; j < ts.states; ++j) {
            if (sigma[j] != ts.pi[j]) {
                fail(rep.stationary,
                     "pi P^" + std::string(1, letter_name(static_cast<Letter>(t), spec)) +
                         " differs from pi at state " + std::to_string(j));
                break;
            }
        }
    }

    if (spec.mode == GroupMode::group) {
        for (std::uint32_t g = 0; g < spec.rank && rep.reversible; ++g) {
            Letter s = positive_generator(g, spec);
            Letter si = inverse_letter(s, spec);
            for (std::uint32_t i = 0; i < ts.states && rep.reversible; ++i) {
                for (const auto& [j, q] : ts.rows[s][i]) {
                    const Rational* back = find_entry(ts, si, j, i);
                    Rational lhs = ts.pi[i] * q;
                    Rational rhs = back ? ts.pi[j] * (*back) : Rational(0);
                    if (lhs != rhs) {
                        fail(rep.reversible, "pi_i P^" + std::string(1, letter_name(s, spec)) +
                                                 "_ij != pi_j P^" +
                                                 std::string(1, letter_name(si, spec)) +
                                                 "_ji at (i,j)=(" + std::to_string(i) + "," +
                                                 std::to_string(j) + ")");
                        break;
                    }
                }
                // entries present only in the reverse matrix
                for (const auto& [j, q] : ts.rows[si][i]) {
                    if (sgn(ts.pi[i] * q) != 0 && find_entry(ts, s, j, i) == nullptr &&
                        sgn(ts.pi[j]) != 0) {
                        fail(rep.reversible,
                             "P^" + std::string(1, letter_name(si, spec)) + " has support at (" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 ") with no mirror entry");
                        break;
                    }
                }
            }
        }
    }
    return rep;
}

/// A shift-invariant measure given at desk scale: an i.i.d. product or the
/// tree-indexed Markov measure of a TransitionSystem.
struct MeasureSpec {
    enum class Kind { bernoulli, tree_markov };

    Kind kind = Kind::bernoulli;
    Alphabet alphabet;
    std::vector<Rational> p; // bernoulli base distribution
    TransitionSystem ts;     // tree_markov

    static MeasureSpec bernoulli(std::vector<Rational> base) {
        MeasureSpec mu;
        mu.kind = Kind::bernoulli;
        mu.alphabet = Alphabet{static_cast<std::uint32_t>(base.size())};
        mu.p = std::move(base);
        return mu;
    }

    static MeasureSpec tree_markov(TransitionSystem ts) {
        MeasureSpec mu;
        mu.kind = Kind::tree_markov;
        mu.alphabet = Alphabet{ts.states};
        mu.ts = std::move(ts);
        return mu;
    }
};

/// Throws invalid_input_error unless mu is a well-formed shift-invariant
/// measure (tree-Markov specs must pass validate_ts).
inline void validate_measure(const MeasureSpec& mu, const GroupSpec& spec) {
    validate_alphabet(mu.alphabet);
    if (mu.kind == MeasureSpec::Kind::bernoulli) {
        if (mu.p.size() != mu.alphabet.size)
            throw invalid_input_error("bernoulli base length does not match the alphabet");
        Rational sum = 0;
        for (const Rational& q : mu.p) {
            if (sgn(q) < 0) throw invalid_input_error("bernoulli base has a negative entry");
            sum += q;
        }
        if (sum != 1) throw invalid_input_error("bernoulli base does not sum to 1");
    } else {
        if (mu.ts.states != mu.alphabet.size)
            throw invalid_input_error("transition system state count does not match the alphabet");
        ValidationReport rep = validate_ts(mu.ts, spec);
        if (!rep.pass())
            throw invalid_input_error("measure transition system failed validation: " +
                                      (rep.failures.empty() ? std::string("unknown")
                                                            : rep.failures.front()));
    }
}

/// Weighted exhaustive enumeration of the measure-positive patterns on a
/// site set, depth-first in canonical order; fn(values, weight) per leaf.
/// Tree-Markov evaluation needs the sites to be suffix-closed (weight =
/// pi(root) times the tree-edge transitions); Bernoulli accepts any sites.
template <class Fn>
void for_each_weighted_pattern(const MeasureSpec& mu, const GroupSpec& spec, const SiteSet& sites,
                               Budget& budget, Fn&& fn) {
    const std::uint32_t K = mu.alphabet.size;
    std::vector<std::uint32_t> values(sites.size());
    if (sites.empty()) {
        fn(static_cast<const std::vector<std::uint32_t>&>(values), Rational(1));
        return;
    }
    const bool markov = mu.kind == MeasureSpec::Kind::tree_markov;
    ParentStructure ps;
    if (markov) ps = parent_structure(sites, spec);

    std::vector<Rational> w(sites.size() + 1);
    w[0] = 1;
    auto rec = [&](auto&& self, std::size_t k) -> void {
        for (std::uint32_t v = 0; v < K; ++v) {
            const Rational* f;
            if (!markov) {
                f = &mu.p[v];
            } else if (k == 0) {
                f = &mu.ts.pi[v];
            } else {
                f = find_entry(mu.ts, ps.letter[k], values[ps.parent[k]], v);
            }
            if (f == nullptr || sgn(*f) <= 0) continue;
            budget.charge();
            values[k] = v;
            w[k + 1] = w[k] * (*f);
            if (k + 1 == sites.size())
                fn(static_cast<const std::vector<std::uint32_t>&>(values), w[k + 1]);
            else
                self(self, k + 1);
        }
    };
    rec(rec, 0);
}

/// Exact cylinder probability of a pattern.
inline Rational marginal(const MeasureSpec& mu, const Pattern& p, const GroupSpec& spec,
                         Budget& budget) {
    for (std::uint32_t v : p.values)
        if (v >= mu.alphabet.size)
            throw invalid_input_error("pattern symbol outside the measure's alphabet");
    if (mu.kind == MeasureSpec::Kind::bernoulli) {
        budget.charge(p.values.size());
        Rational q = 1;
        for (std::uint32_t v : p.values) q *= mu.p[v];
        return q;
    }
    if (p.domain.empty()) return Rational(1);
    // Sum the tree-Markov weights over all extensions to the suffix closure;
    // unconstrained subtrees below the closure sum out to 1 row by row, so
    // this equals the textbook sum over extensions to a full ball.
    SiteSet closure = suffix_closure(p.domain);
    ParentStructure ps = parent_structure(closure, spec);
    std::vector<std::int64_t> forced(closure.size(), -1);
    for (std::size_t i = 0; i < p.domain.size(); ++i)
        forced[*closure.find(p.domain[i])] = p.values[i];

    const std::uint32_t K = mu.alphabet.size;
    std::vector<std::uint32_t> values(closure.size());
    std::vector<Rational> w(closure.size() + 1);
    w[0] = 1;
    Rational total = 0;
    auto rec = [&](auto&& self, std::size_t k) -> void {
        std::uint32_t lo = 0, hi = K;
        if (forced[k] >= 0) {
            lo = static_cast<std::uint32_t>(forced[k]);
            hi = lo + 1;
        }
        for (std::uint32_t v = lo; v < hi; ++v) {
            const Rational* f = k == 0 ? &mu.ts.pi[v]
                                       : find_entry(mu.ts, ps.letter[k], values[ps.parent[k]], v);
            if (f == nullptr || sgn(*f) <= 0) continue;
            budget.charge();
            values[k] = v;
            w[k + 1] = w[k] * (*f);
            if (k + 1 == closure.size())
                total += w[k + 1];
            else
                self(self, k + 1);
        }
    };
    rec(rec, 0);
    return total;
}

/// Pushforward of the window marginal under the partition labeling; exact
/// probability vector over the labels, summing to 1.
inline std::vector<Rational> partition_distribution(const MeasureSpec& mu,
                                                    const WindowPartition& part,
                                                    const GroupSpec& spec, Budget& budget) {
    if (part.alphabet.size != mu.alphabet.size)
        throw invalid_input_error("partition alphabet does not match the measure");
    std::vector<Rational> dist(part.label_count, Rational(0));
    if (part.window.empty()) {
        dist[part.labels[0]] = 1;
        return dist;
    }
    const SiteSet iter = mu.kind == MeasureSpec::Kind::bernoulli ? part.window
                                                                 : suffix_closure(part.window);
    std::vector<std::size_t> wpos(part.window.size());
    for (std::size_t i = 0; i < part.window.size(); ++i) wpos[i] = *iter.find(part.window[i]);
    const std::uint64_t K = mu.alphabet.size;
    for_each_weighted_pattern(mu, spec, iter, budget,
                              [&](const std::vector<std::uint32_t>& v, const Rational& w) {
                                  std::uint64_t idx = 0;
                                  for (std::size_t pos : wpos) idx = idx * K + v[pos];
                                  dist[part.labels[idx]] += w;
                              });
    return dist;
}

/// Support skeleton of a transition system (or of a measure, below): CSR
/// lists of the positive-probability successors, for the hot enumeration
/// paths that never need the probabilities themselves.
struct TransitionCsr {
    std::uint32_t states = 0;
    std::vector<std::vector<std::uint32_t>> off; // [letter][state + 1]
    std::vector<std::vector<std::uint32_t>> col; // [letter]
    std::vector<std::uint32_t> roots;            // states with pi > 0, ascending
};

inline TransitionCsr make_csr(const TransitionSystem& ts) {
    TransitionCsr c;
    c.states = ts.states;
    c.off.resize(ts.rows.size());
    c.col.resize(ts.rows.size());
    for (std::size_t t = 0; t < ts.rows.size(); ++t) {
        c.off[t].assign(ts.states + 1, 0);
        for (std::uint32_t i = 0; i < ts.states; ++i) {
            c.off[t][i] = static_cast<std::uint32_t>(c.col[t].size());
            for (const auto& [j, q] : ts.rows[t][i])
                if (sgn(q) > 0) c.col[t].push_back(j);
        }
        c.off[t][ts.states] = static_cast<std::uint32_t>(c.col[t].size());
    }
    for (std::uint32_t i = 0; i < ts.states; ++i)
        if (sgn(ts.pi[i]) > 0) c.roots.push_back(i);
    return c;
}

/// The K-level support skeleton of a measure: exactly the patterns with
/// positive marginal are reachable along it on any suffix-closed site set.
inline TransitionCsr measure_support_csr(const MeasureSpec& mu, const GroupSpec& spec) {
    if (mu.kind == MeasureSpec::Kind::tree_markov) return make_csr(mu.ts);
    TransitionCsr c;
    c.states = mu.alphabet.size;
    for (std::uint32_t v = 0; v < mu.alphabet.size; ++v)
        if (sgn(mu.p[v]) > 0) c.roots.push_back(v);
    c.off.resize(letter_count(spec));
    c.col.resize(letter_count(spec));
    for (std::size_t t = 0; t < c.off.size(); ++t) {
        c.off[t].assign(c.states + 1, 0);
        for (std::uint32_t i = 0; i < c.states; ++i) {
            c.off[t][i] = static_cast<std::uint32_t>(c.col[t].size());
            c.col[t].insert(c.col[t].end(), c.roots.begin(), c.roots.end());
        }
        c.off[t][c.states] = static_cast<std::uint32_t>(c.col[t].size());
    }
    return c;
}

} // namespace fgshift
