#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fgshift {

/// Base class for all errors raised by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad generator index, non-reduced word
/// where one is required, dimension mismatch, invalid rational, ...).
class invalid_input_error : public error {
public:
    using error::error;
};

/// An enumeration exceeded its configured node budget.
class budget_exceeded_error : public error {
public:
    explicit budget_exceeded_error(std::uint64_t limit)
        : error("enumeration budget exceeded (limit " + std::to_string(limit) + " nodes)"),
          limit_(limit) {}

    std::uint64_t limit() const noexcept { return limit_; }

private:
    std::uint64_t limit_;
};

} // namespace fgshift
