#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sbmdyn {

// Error categories surface as distinct CLI exit codes (see commands.hpp).

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated state lost all weight.
struct DegenerateStateError : NumericalError {
    using NumericalError::NumericalError;
};

/// Accumulated discarded weight exceeded the configured budget.
struct TruncationBudgetExceeded : NumericalError {
    using NumericalError::NumericalError;
};

/// An analysis feature (minimum, peak, ...) is absent from the data.
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Self-consistency scan found a number of roots other than two.
struct RootCountError : NotFoundError {
    RootCountError(const std::string& what, std::vector<double> found)
        : NotFoundError(what), roots(std::move(found)) {}
    std::vector<double> roots;
};

}  // namespace sbmdyn
