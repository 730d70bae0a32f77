#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "odo/errors.hpp"
#include "odo/types.hpp"

namespace odo {

// J(w) = 2 lambda gamma_c w / (w^2 + gamma_c^2)
struct DrudeLorentz {
    double lambda;
    double gamma_c;
};

// J(w) = 2 lambda omega0^2 zeta w / ((w^2 - omega0^2)^2 + zeta^2 w^2), underdamped zeta < 2 omega0
struct BrownianOscillator {
    double lambda;
    double omega0;
    double zeta;
};

// J(w) = (pi/2) alpha omega_c^{1-s} w^s exp(-w/omega_c)
struct OhmicExponential {
    double alpha;
    double s;
    double omega_c;
};

struct DiscreteMode {
    double c;     // coupling amplitude
    double omega; // mode frequency > 0
};

struct SpectralDensityModel {
    std::variant<DrudeLorentz, BrownianOscillator, OhmicExponential,
                 std::vector<DiscreteMode>>
        form;

    bool is_discrete() const {
        return std::holds_alternative<std::vector<DiscreteMode>>(form);
    }
    const std::vector<DiscreteMode>& modes() const {
        return std::get<std::vector<DiscreteMode>>(form);
    }

    static SpectralDensityModel drude(double lambda, double gamma_c);
    static SpectralDensityModel brownian(double lambda, double omega0, double zeta);
    static SpectralDensityModel ohmic(double alpha, double s, double omega_c);
    static SpectralDensityModel discrete(std::vector<DiscreteMode> modes);
};

struct BathThermalState {
    double beta = 1.0; // > 0, or +infinity for zero temperature

    static BathThermalState zero_temperature() {
        return {std::numeric_limits<double>::infinity()};
    }
    bool zero_t() const { return std::isinf(beta); }
    // mean occupation 1/(e^{beta w} - 1)
    double nbar(double omega) const {
        if (zero_t()) return 0.0;
        return 1.0 / std::expm1(beta * omega);
    }
};

// J(w); odd in w, zero at w = 0. Discrete models carry no pointwise density.
double spectral_density_value(const SpectralDensityModel& model, double omega);

// (1/pi) Int_0^inf J(w)/w dw, analytic per model (Sum c_j^2/(2 w_j) for discrete).
double reorganization_energy(const SpectralDensityModel& model);

// C(t) = (1/pi) Int dw e^{-iwt} J(w)/(1 - e^{-beta w}); adaptive quadrature with
// contour-rotated tails for rational J, closed sum for discrete models.
// C(-t) = conj(C(t)). Drude-Lorentz C(0) is ultraviolet-divergent and throws.
Complex correlation_function(const SpectralDensityModel& model,
                             const BathThermalState& state, double t);

// Rational J at a complex argument (residue evaluation of decompositions);
// only Drude-Lorentz and Brownian oscillator admit it.
Complex spectral_density_rational(const SpectralDensityModel& model, Complex z);

enum class DiscretizationScheme { equal_reorganization, gauss_legendre };

// Discretize a continuous model into N modes whose Eq.-style cosine/sine sum
// reproduces C(t); equal-reorganization enforces Sum c^2/(2w) = lambda exactly.
SpectralDensityModel discretize_bath(const SpectralDensityModel& model,
                                     const BathThermalState& state, int n_modes,
                                     DiscretizationScheme scheme);

// Frequency scale used for integration cutoffs and discretization grids.
double cutoff_scale(const SpectralDensityModel& model);

} // namespace odo
