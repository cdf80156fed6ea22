#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slimdft {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested measure is not defined for the model, e.g. an unconditional
/// MTTF when the system fails with probability below one.
class UndefinedMeasure : public Error {
public:
    using Error::Error;
};

/// State exploration hit the configured budget.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::size_t reached, std::size_t budget)
        : Error("state budget exceeded: " + std::to_string(reached) + " states explored (budget " +
                std::to_string(budget) + ")"),
          reached_(reached) {}

    std::size_t reached() const { return reached_; }

private:
    std::size_t reached_;
};

/// Non-deterministic choices survive where a deterministic model is required.
class NondeterminismRemains : public Error {
public:
    explicit NondeterminismRemains(std::size_t state)
        : Error("non-determinism remains at state " + std::to_string(state)), state_(state) {}

    std::size_t state() const { return state_; }

private:
    std::size_t state_;
};

/// Modular analysis requested but the static skeleton contains dynamic gates.
class NotModular : public Error {
public:
    using Error::Error;
};

/// Elimination divided by a polynomial that is identically zero.
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

/// Interval evaluation found a denominator interval containing zero.
class DenominatorMayVanish : public Error {
public:
    using Error::Error;
};

/// Measure/optimisation combination rejected by the compatibility matrix.
class IncompatibleMeasure : public Error {
public:
    using Error::Error;
};

} // namespace slimdft
