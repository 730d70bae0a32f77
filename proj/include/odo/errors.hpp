#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace odo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bath
struct DiscreteModelHasNoDensity : Error { using Error::Error; };
struct QuadratureFailure : Error {
    QuadratureFailure(const std::string& what, double achieved)
        : Error(what), achieved_error(achieved) {}
    double achieved_error;
};

// decomp
struct ModelUnsupported : Error { using Error::Error; };
struct EigenSolveFailure : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct UnstableRoots : Error { using Error::Error; };
struct UnpairedTerms : Error {
    UnpairedTerms(const std::string& what, std::vector<int> terms_)
        : Error(what), terms(std::move(terms_)) {}
    std::vector<int> terms;
};

// hierarchy / state
struct CapacityExceeded : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct InvalidDensityMatrix : Error { using Error::Error; };
struct PairingRequired : Error { using Error::Error; };

// propagator
struct StepLimitExceeded : Error { using Error::Error; };
struct NonFiniteState : Error {
    NonFiniteState(const std::string& what, double when) : Error(what), t(when) {}
    double t;
};

// oracle
struct DimensionBudget : Error { using Error::Error; };
struct LeakageExceeded : Error { using Error::Error; };
struct NotDephasing : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// observables
struct TierTooShallow : Error { using Error::Error; };

// cli
struct ConfigError : Error {
    ConfigError(const std::string& field_, const std::string& what)
        : Error(field_ + ": " + what), field(field_) {}
    std::string field;
};

} // namespace odo
