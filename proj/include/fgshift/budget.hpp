#pragma once

#include <cstdint>

#include "fgshift/errors.hpp"

namespace fgshift {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// Visited-node budget shared by the enumerative operations of one run.
/// All exhaustive loops charge it as they go and fail deterministically with
/// budget_exceeded_error instead of running unbounded.
class Budget {
public:
    explicit Budget(std::uint64_t limit = kDefaultBudget) : limit_(limit) {}

    void charge(std::uint64_t nodes = 1) {
        used_ += nodes;
        if (used_ > limit_) throw budget_exceeded_error(limit_);
    }

    /// Charge only if the whole amount fits; used for up-front size guards.
    bool fits(std::uint64_t nodes) const noexcept { return used_ + nodes <= limit_; }

    std::uint64_t limit() const noexcept { return limit_; }
    std::uint64_t used() const noexcept { return used_; }

private:
    std::uint64_t limit_;
    std::uint64_t used_ = 0;
};

} // namespace fgshift
