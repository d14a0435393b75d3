#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "fgshift/errors.hpp"

namespace fgshift {

/// Exact arbitrary-precision rational. All probabilities and exact entropy
/// values in this library are Rationals; floating point only appears when a
/// value is provably irrational (non-dyadic entropies).
using Rational = mpq_class;

/// Parse "a/b" or "a" (decimal integers, optional leading '-'). Rejects a
/// zero denominator and anything that is not a plain fraction.
inline Rational parse_rational(const std::string& text) {
    const auto bad = [&]() -> invalid_input_error {
        return invalid_input_error("invalid rational: \"" + text + "\"");
    };
    if (text.empty()) throw bad();
    std::string num_s = text, den_s = "1";
    if (auto slash = text.find('/'); slash != std::string::npos) {
        num_s = text.substr(0, slash);
        den_s = text.substr(slash + 1);
    }
    mpz_class num, den;
    if (num_s.empty() || den_s.empty()) throw bad();
    if (mpz_set_str(num.get_mpz_t(), num_s.c_str(), 10) != 0) throw bad();
    if (mpz_set_str(den.get_mpz_t(), den_s.c_str(), 10) != 0) throw bad();
    if (den == 0) throw bad();
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Canonical lowest-terms rendering: "2", "-1/3", "0".
inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

/// True iff q = 2^(-k) for some k >= 0 (includes q = 1); stores k.
inline bool is_power_of_two_reciprocal(const Rational& q, unsigned long& k) {
    if (sgn(q) <= 0) return false;
    if (q.get_num() != 1) return false;
    const mpz_class& den = q.get_den();
    if (mpz_popcount(den.get_mpz_t()) != 1) return false;
    k = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
    return true;
}

} // namespace fgshift
