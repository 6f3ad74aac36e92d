#ifndef BIASIM_ERRORS_HPP
#define BIASIM_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace biasim {

/// Receiver index outside [0, num_users).
struct InvalidUser : std::out_of_range {
    explicit InvalidUser(const std::string& what) : std::out_of_range(what) {}
};

/// Beamformers requested for a slot triple that is not a type-Z pattern.
struct NotAZPattern : std::invalid_argument {
    explicit NotAZPattern(const std::string& what) : std::invalid_argument(what) {}
};

/// Relative block offset too small to decompose the channel into type-Z blocks.
struct InfeasibleOffset : std::invalid_argument {
    explicit InfeasibleOffset(const std::string& what) : std::invalid_argument(what) {}
};

/// Effective 2x2 channel too ill-conditioned to invert (condition number > 1e12).
struct SingularEffectiveChannel : std::runtime_error {
    explicit SingularEffectiveChannel(const std::string& what) : std::runtime_error(what) {}
};

/// Exhaustive enumeration would exceed the configured tuple budget.
struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(const std::string& what, std::string required_tuples)
        : std::runtime_error(what), required(std::move(required_tuples)) {}
    std::string required;  // decimal string; the count can exceed 64 bits
};

/// Argument outside the mathematical domain of a formula.
struct OutOfDomain : std::domain_error {
    explicit OutOfDomain(const std::string& what) : std::domain_error(what) {}
};

}  // namespace biasim

#endif  // BIASIM_ERRORS_HPP
