#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "fgshift/budget.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/siteset.hpp"

namespace fgshift {

struct Alphabet {
    std::uint32_t size = 2;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

inline void validate_alphabet(const Alphabet& k) {
    if (k.size < 1) throw invalid_input_error("alphabet size must be >= 1");
}

/// A finite configuration: values[i] is the symbol at domain[i]. Symbols are
/// plain indices so the same type carries K-patterns and super-alphabet
/// patterns.
struct Pattern {
    SiteSet domain;
    std::vector<std::uint32_t> values;

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

inline mpz_class pattern_space_size(std::size_t domain_size, const Alphabet& k) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), k.size, domain_size);
    return out;
}

/// Charge K^|domain| against the budget up front; the guard that keeps the
/// exhaustive enumerations from running unbounded.
inline std::uint64_t charge_pattern_space(std::size_t domain_size, const Alphabet& k,
                                          Budget& budget) {
    mpz_class total = pattern_space_size(domain_size, k);
    if (!total.fits_ulong_p()) throw budget_exceeded_error(budget.limit());
    budget.charge(total.get_ui());
    return total.get_ui();
}

/// Canonical index of a value tuple: site-major, first (shortlex-least) site
/// most significant. Enumerating indices 0,1,2,... lists patterns in
/// (shortlex-site, lexicographic-symbol) order.
inline std::uint64_t pattern_index(const std::vector<std::uint32_t>& values, const Alphabet& k) {
    std::uint64_t idx = 0;
    for (std::uint32_t v : values) idx = idx * k.size + v;
    return idx;
}

inline std::vector<std::uint32_t> values_from_index(std::uint64_t index, std::size_t domain_size,
                                                    const Alphabet& k) {
    std::vector<std::uint32_t> v(domain_size);
    for (std::size_t i = domain_size; i-- > 0;) {
        v[i] = static_cast<std::uint32_t>(index % k.size);
        index /= k.size;
    }
    return v;
}

inline Pattern pattern_from_index(const SiteSet& domain, const Alphabet& k, std::uint64_t index) {
    return Pattern{domain, values_from_index(index, domain.size(), k)};
}

/// All |K|^|domain| value tuples in canonical order. fn(values) per pattern.
template <class Fn>
void for_each_pattern(const SiteSet& domain, const Alphabet& k, Budget& budget, Fn&& fn) {
    validate_alphabet(k);
    charge_pattern_space(domain.size(), k, budget);
    std::vector<std::uint32_t> v(domain.size(), 0);
    for (;;) {
        fn(static_cast<const std::vector<std::uint32_t>&>(v));
        std::size_t i = v.size();
        while (i > 0) {
            if (++v[i - 1] < k.size) break;
            v[i - 1] = 0;
            --i;
        }
        if (i == 0) break;
    }
}

inline std::vector<Pattern> enumerate_patterns(const SiteSet& domain, const Alphabet& k,
                                               Budget& budget) {
    std::vector<Pattern> out;
    for_each_pattern(domain, k, budget,
                     [&](const std::vector<std::uint32_t>& v) { out.push_back({domain, v}); });
    return out;
}

/// Right translate: domain becomes domain*g, the value at h*g is the value at
/// h. Matches the shift convention used by the coding map.
inline Pattern translate_pattern(const Pattern& p, const Word& g, const GroupSpec& spec) {
    SiteSet domain = translate_sites(p.domain, g, spec);
    if (domain.size() != p.domain.size())
        throw invalid_input_error("translation collapsed the pattern domain");
    std::vector<std::uint32_t> values(domain.size());
    for (std::size_t i = 0; i < p.domain.size(); ++i)
        values[*domain.find(mul(p.domain[i], g, spec))] = p.values[i];
    return Pattern{std::move(domain), std::move(values)};
}

inline Pattern restrict_pattern(const Pattern& p, const SiteSet& sites) {
    std::vector<std::uint32_t> values(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        auto pos = p.domain.find(sites[i]);
        if (!pos) throw invalid_input_error("restriction target is not a subset of the domain");
        values[i] = p.values[*pos];
    }
    return Pattern{sites, std::move(values)};
}

} // namespace fgshift
