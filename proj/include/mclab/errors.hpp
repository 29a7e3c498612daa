#pragma once

#include <stdexcept>
#include <string>

namespace mclab {

// Error taxonomy shared by all modules. Preconditions on mathematical
// domains throw std::domain_error / std::invalid_argument directly.

// A table, cap or iteration budget would be exceeded. Message names the budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A logged tail or quadrature bound exceeds the requested tolerance.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input object violates a model assumption (e.g. mean prime value
// inconsistent with the declared density parameter).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A rejection sampler ran out of its iteration cap.
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration file or flag combination. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mclab
