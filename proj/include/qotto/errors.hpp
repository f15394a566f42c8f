#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qotto {

// Invalid configuration or input. The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical or physical failure inside a computation. CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gauss-decomposition coordinate singularity in factorize().
struct DegenerateFactorization : NumericalError {
    using NumericalError::NumericalError;
};

// Vanishing composition denominator; carries the index of the offending
// element when raised from a chain.
struct CompositionSingularity : NumericalError {
    explicit CompositionSingularity(const std::string& msg,
                                    std::ptrdiff_t element_index = -1)
        : NumericalError(msg), index(element_index) {}
    std::ptrdiff_t index;
};

// Zero (or numerically zero) driving field: triplet eigenbasis undefined.
struct DegenerateField : NumericalError {
    using NumericalError::NumericalError;
};

// Assembled evolution operator deviates from unitarity beyond tolerance.
struct NonUnitary : NumericalError {
    using NumericalError::NumericalError;
};

// Transition matrix fails symmetry / double stochasticity checks.
struct StochasticityViolation : NumericalError {
    using NumericalError::NumericalError;
};

// Persistence triple whose implied off-diagonal probabilities leave [0, 1]:
// not realizable by any unitary.
struct UnphysicalTriple : NumericalError {
    using NumericalError::NumericalError;
};

// Exponent overflow in thermal-state evaluation.
struct RangeError : NumericalError {
    using NumericalError::NumericalError;
};

// classify_regime() called with W != Q_h + Q_c or a second-law-violating
// sign pattern.
struct InconsistentEnergies : NumericalError {
    using NumericalError::NumericalError;
};

// Efficiency maximization found no engine-regime point.
struct NoEngineRegion : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace qotto
