#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/measure.hpp"
#include "fgshift/partition.hpp"
#include "fgshift/rational.hpp"

namespace fgshift {

enum class Unit { bits, nats };

inline long double log2_mpz(const mpz_class& z) {
    signed long exp = 0;
    double d = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return static_cast<long double>(exp) + std::log2(static_cast<long double>(d));
}

/// Entropy amount: always a long double, plus the exact rational value when
/// one exists (all atoms dyadic, bits only).
struct EntropyValue {
    long double value = 0.0L;
    std::optional<Rational> exact;
    Unit unit = Unit::bits;
};

inline EntropyValue ev_add(const EntropyValue& a, const EntropyValue& b) {
    if (a.unit != b.unit) throw error("entropy unit mismatch");
    EntropyValue r{a.value + b.value, std::nullopt, a.unit};
    if (a.exact && b.exact) r.exact = *a.exact + *b.exact;
    return r;
}

inline EntropyValue ev_sub(const EntropyValue& a, const EntropyValue& b) {
    if (a.unit != b.unit) throw error("entropy unit mismatch");
    EntropyValue r{a.value - b.value, std::nullopt, a.unit};
    if (a.exact && b.exact) r.exact = *a.exact - *b.exact;
    return r;
}

inline EntropyValue ev_scale(long long c, const EntropyValue& a) {
    EntropyValue r{static_cast<long double>(c) * a.value, std::nullopt, a.unit};
    if (a.exact) r.exact = Rational(static_cast<long>(c)) * *a.exact;
    return r;
}

inline bool ev_equal(const EntropyValue& a, const EntropyValue& b, long double tol = 1e-12L) {
    if (a.unit != b.unit) return false;
    if (a.exact && b.exact) return *a.exact == *b.exact;
    return std::fabs(a.value - b.value) <= tol;
}

inline std::string format_long_double(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12Lg", v);
    return buf;
}

/// Shannon entropy of an exact distribution. Rejects anything that is not a
/// probability vector. The exact field is set when every positive atom is a
/// reciprocal power of two and the unit is bits.
inline EntropyValue shannon(const std::vector<Rational>& dist, Unit unit) {
    Rational sum = 0;
    for (const Rational& q : dist) {
        if (sgn(q) < 0) throw invalid_input_error("distribution has a negative entry");
        sum += q;
    }
    if (sum != 1) throw invalid_input_error("distribution does not sum to 1");

    long double bits = 0.0L;
    bool dyadic = true;
    Rational exact_bits = 0;
    for (const Rational& q : dist) {
        if (sgn(q) == 0) continue;
        bits += static_cast<long double>(mpq_get_d(q.get_mpq_t())) *
                (log2_mpz(q.get_den()) - log2_mpz(q.get_num()));
        unsigned long k = 0;
        if (dyadic && is_power_of_two_reciprocal(q, k))
            exact_bits += q * Rational(static_cast<unsigned long>(k));
        else
            dyadic = false;
    }
    EntropyValue ev;
    ev.unit = unit;
    if (unit == Unit::bits) {
        ev.value = bits;
        if (dyadic) ev.exact = exact_bits;
    } else {
        ev.value = bits * 0.6931471805599453094172321214581766L; // ln 2
    }
    return ev;
}

inline EntropyValue partition_entropy(const MeasureSpec& mu, const WindowPartition& part,
                                      const GroupSpec& spec, Unit unit, Budget& budget) {
    return shannon(partition_distribution(mu, part, spec, budget), unit);
}

/// H(p | q) = H(p join q) - H(q), exact when both terms are.
inline EntropyValue cond_entropy(const MeasureSpec& mu, const WindowPartition& p,
                                 const WindowPartition& q, const GroupSpec& spec, Unit unit,
                                 Budget& budget) {
    return ev_sub(partition_entropy(mu, join(p, q, budget), spec, unit, budget),
                  partition_entropy(mu, q, spec, unit, budget));
}

/// F(P) = (1 - 2r) H(P) + sum over generators s of H(P join P translated by
/// s). Defined for group mode only.
inline EntropyValue F_quantity(const MeasureSpec& mu, const WindowPartition& part,
                               const GroupSpec& spec, Unit unit, Budget& budget) {
    if (spec.mode != GroupMode::group)
        throw invalid_input_error("the F quantity is unsupported in semigroup mode");
    EntropyValue total = ev_scale(1 - 2 * static_cast<long long>(spec.rank),
                                  partition_entropy(mu, part, spec, unit, budget));
    for (std::uint32_t i = 0; i < spec.rank; ++i) {
        Word s;
        s.letters.push_back(positive_generator(i, spec));
        WindowPartition pair = join(part, translate_partition(part, s, spec, budget), budget);
        total = ev_add(total, partition_entropy(mu, pair, spec, unit, budget));
    }
    return total;
}

/// F evaluated along the ball joins of a single-site partition; stops early
/// (truncated) if the budget runs out.
struct FSequence {
    std::vector<EntropyValue> values; // index m = ball radius
    bool truncated = false;
};

inline FSequence f_sequence(const MeasureSpec& mu, const WindowPartition& alpha,
                            const GroupSpec& spec, std::uint32_t m_max, Unit unit,
                            Budget& budget) {
    FSequence seq;
    for (std::uint32_t m = 0; m <= m_max; ++m) {
        try {
            WindowPartition pm = alpha_join_over_ball(alpha, m, spec, budget);
            seq.values.push_back(F_quantity(mu, pm, spec, unit, budget));
        } catch (const budget_exceeded_error&) {
            seq.truncated = true;
            break;
        }
    }
    return seq;
}

/// The rank-one fair-coin study: entropies of the punctured window
/// partitions P_n next to the F values of the ball partitions.
struct CounterexampleRow {
    std::uint32_t n = 0;
    EntropyValue H_Pn;
    EntropyValue H_join; // H(P_n joined with its inverse-step translate)
    EntropyValue H_cond; // H(P_n | translate)
    EntropyValue F_Pn;
};

struct EntropyReport {
    std::vector<CounterexampleRow> rows;
    FSequence f_seq;
    EntropyValue h; // base entropy H(1/2, 1/2)
    bool f_seq_stable = false;
};

inline EntropyReport counterexample_report(std::uint32_t n_max, Unit unit, Budget& budget) {
    if (n_max < 1) throw invalid_input_error("n_max must be at least 1");
    GroupSpec spec; // rank 1, group mode
    MeasureSpec mu = MeasureSpec::bernoulli({Rational(1, 2), Rational(1, 2)});
    EntropyReport rep;
    Word back;
    back.letters.push_back(inverse_letter(positive_generator(0, spec), spec));
    for (std::uint32_t n = 1; n <= n_max; ++n) {
        CounterexampleRow row;
        row.n = n;
        WindowPartition pn = pn_partition(n, budget);
        WindowPartition shifted = translate_partition(pn, back, spec, budget);
        row.H_Pn = partition_entropy(mu, pn, spec, unit, budget);
        row.H_join = partition_entropy(mu, join(shifted, pn, budget), spec, unit, budget);
        row.H_cond = ev_sub(row.H_join, partition_entropy(mu, shifted, spec, unit, budget));
        row.F_Pn = F_quantity(mu, pn, spec, unit, budget);
        rep.rows.push_back(std::move(row));
    }
    rep.f_seq = f_sequence(mu, alpha_partition(Alphabet{2}, budget), spec, n_max, unit, budget);
    if (rep.f_seq.truncated) throw budget_exceeded_error(budget.limit());
    rep.h = shannon(mu.p, unit);
    rep.f_seq_stable = true;
    for (const EntropyValue& v : rep.f_seq.values)
        if (!ev_equal(v, rep.f_seq.values.front())) rep.f_seq_stable = false;
    return rep;
}

} // namespace fgshift
