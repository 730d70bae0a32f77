#include "odo/bath.hpp"

#include <cmath>
#include <limits>

#include "quadrature.hpp"

namespace odo {

SpectralDensityModel SpectralDensityModel::drude(double lambda, double gamma_c) {
    if (lambda <= 0 || gamma_c <= 0) throw Error("drude: parameters must be > 0");
    return {DrudeLorentz{lambda, gamma_c}};
}
SpectralDensityModel SpectralDensityModel::brownian(double lambda, double omega0,
                                                    double zeta) {
    if (lambda <= 0 || omega0 <= 0 || zeta <= 0)
        throw Error("brownian: parameters must be > 0");
    return {BrownianOscillator{lambda, omega0, zeta}};
}
SpectralDensityModel SpectralDensityModel::ohmic(double alpha, double s, double omega_c) {
    if (alpha <= 0 || s <= 0 || omega_c <= 0)
        throw Error("ohmic: parameters must be > 0");
    return {OhmicExponential{alpha, s, omega_c}};
}
SpectralDensityModel SpectralDensityModel::discrete(std::vector<DiscreteMode> modes) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].omega <= 0) throw Error("discrete: mode frequencies must be > 0");
        for (std::size_t j = i + 1; j < modes.size(); ++j)
            if (modes[i].omega == modes[j].omega)
                throw Error("discrete: mode frequencies must be distinct");
    }
    return {std::move(modes)};
}

namespace {

// J(w)/w for w >= 0; finite at w = 0 for s >= 1.
double j_over_w(const SpectralDensityModel& m, double w) {
    if (auto* d = std::get_if<DrudeLorentz>(&m.form))
        return 2.0 * d->lambda * d->gamma_c / (w * w + d->gamma_c * d->gamma_c);
    if (auto* b = std::get_if<BrownianOscillator>(&m.form)) {
        const double a = w * w - b->omega0 * b->omega0;
        return 2.0 * b->lambda * b->omega0 * b->omega0 * b->zeta /
               (a * a + b->zeta * b->zeta * w * w);
    }
    const auto& o = std::get<OhmicExponential>(m.form);
    return 0.5 * M_PI * o.alpha * std::pow(o.omega_c, 1.0 - o.s) *
           std::pow(w, o.s - 1.0) * std::exp(-w / o.omega_c);
}

// Rational J at complex argument (tail contour evaluation).
Complex j_complex(const SpectralDensityModel& m, Complex z) {
    if (auto* d = std::get_if<DrudeLorentz>(&m.form))
        return 2.0 * d->lambda * d->gamma_c * z / (z * z + d->gamma_c * d->gamma_c);
    const auto& b = std::get<BrownianOscillator>(m.form);
    const Complex a = z * z - b.omega0 * b.omega0;
    return 2.0 * b.lambda * b.omega0 * b.omega0 * b.zeta * z /
           (a * a + b.zeta * b.zeta * z * z);
}

bool is_rational(const SpectralDensityModel& m) {
    return std::holds_alternative<DrudeLorentz>(m.form) ||
           std::holds_alternative<BrownianOscillator>(m.form);
}

// Largest |Re pole| of a rational J (contour legality margin).
double pole_clearance(const SpectralDensityModel& m) {
    if (std::holds_alternative<DrudeLorentz>(m.form)) return 0.0;
    const auto& b = std::get<BrownianOscillator>(m.form);
    const double disc = b.omega0 * b.omega0 - 0.25 * b.zeta * b.zeta;
    return disc > 0 ? std::sqrt(disc) : 0.0;
}

// w/(1 - e^{-beta w}), stable across w = 0 (limit 1/beta).
double wbose(double w, double beta) {
    const double x = beta * w;
    if (std::abs(x) < 1e-5)
        return (1.0 + 0.5 * x + x * x / 12.0) / beta;
    return w / (-std::expm1(-x));
}

Complex corr_discrete(const std::vector<DiscreteMode>& modes,
                      const BathThermalState& st, double t) {
    Complex c{0.0, 0.0};
    for (const auto& m : modes) {
        const double nb = st.nbar(m.omega);
        const Complex down = std::exp(Complex(0.0, -m.omega * t));
        c += 0.5 * m.c * m.c * ((nb + 1.0) * down + nb * std::conj(down));
    }
    return c;
}

Complex corr_continuous(const SpectralDensityModel& model, const BathThermalState& st,
                        double t) {
    const double scale = cutoff_scale(model);
    const bool rational = is_rational(model);
    double omega_max;
    if (rational) {
        omega_max = 2.0 * pole_clearance(model) + 6.0 * scale;
        if (!st.zero_t()) omega_max = std::max(omega_max, 40.0 / st.beta);
    } else {
        // exponential cutoff: integrate until J is negligible, no tail needed
        const auto& o = std::get<OhmicExponential>(model.form);
        omega_max = o.omega_c * (60.0 + 10.0 * o.s);
        if (!st.zero_t()) omega_max = std::max(omega_max, 40.0 / st.beta);
    }

    const double lam = reorganization_energy(model);
    const double abs_tol = 1e-13 * (1.0 + lam);
    const double rel_tol = 1e-10;

    auto integrand = [&](double w) -> Complex {
        const Complex down = std::exp(Complex(0.0, -w * t));
        if (st.zero_t()) return (1.0 / M_PI) * j_over_w(model, w) * w * down;
        const double wb = wbose(w, st.beta);
        const double therm = wb * std::exp(-st.beta * w);
        return (1.0 / M_PI) * j_over_w(model, w) *
               (wb * down + therm * std::conj(down));
    };
    auto main = quad::integrate(integrand, 0.0, omega_max, abs_tol, rel_tol);

    Complex tail{0.0, 0.0};
    double tail_err = 0.0;
    if (rational) {
        // zero-temperature part of the tail; the thermal remainder beyond
        // omega_max >= 40/beta is below 1e-17 of scale and is dropped.
        if (t > 0.0) {
            // rotate onto w = omega_max - i u/t:  Int = -i/t e^{-i W t} Int_0^inf J(W - iu/t) e^{-u} du
            auto rot = [&](double u) -> Complex {
                return j_complex(model, Complex(omega_max, -u / t));
            };
            auto r = quad::integrate(rot, 0.0, 45.0, abs_tol, rel_tol);
            tail = (1.0 / M_PI) * std::exp(Complex(0.0, -omega_max * t)) *
                   Complex(0.0, -1.0 / t) * r.value;
            tail_err = r.error / (M_PI * t);
        } else {
            if (std::holds_alternative<DrudeLorentz>(model.form))
                throw QuadratureFailure(
                    "correlation_function: C(0) is ultraviolet-divergent for "
                    "Drude-Lorentz (J ~ 1/w tail)",
                    std::numeric_limits<double>::infinity());
            // real-axis tail via w = omega_max / x
            auto ta = [&](double x) -> Complex {
                const double w = omega_max / x;
                return j_complex(model, Complex(w, 0.0)).real() * omega_max / (x * x);
            };
            auto r = quad::integrate(ta, 1e-8, 1.0, abs_tol, rel_tol);
            tail = r.value / M_PI;
            tail_err = r.error / M_PI;
        }
    }

    const Complex value = main.value + tail;
    const double err = main.error + tail_err;
    if (err > 1e-6 * (1.0 + std::abs(value)))
        throw QuadratureFailure("correlation_function: quadrature did not converge", err);
    return value;
}

} // namespace

Complex spectral_density_rational(const SpectralDensityModel& model, Complex z) {
    if (!is_rational(model))
        throw ModelUnsupported(
            "spectral_density_rational: only rational J(w) variants admit "
            "complex-argument evaluation");
    return j_complex(model, z);
}

double spectral_density_value(const SpectralDensityModel& model, double omega) {
    if (model.is_discrete())
        throw DiscreteModelHasNoDensity(
            "spectral_density_value: discrete models have no pointwise density");
    if (omega == 0.0) return 0.0;
    const double w = std::abs(omega);
    const double j = j_over_w(model, w) * w;
    return omega > 0 ? j : -j;
}

double reorganization_energy(const SpectralDensityModel& model) {
    if (auto* d = std::get_if<DrudeLorentz>(&model.form)) return d->lambda;
    if (auto* b = std::get_if<BrownianOscillator>(&model.form)) return b->lambda;
    if (auto* o = std::get_if<OhmicExponential>(&model.form))
        return 0.5 * o->alpha * std::tgamma(o->s) * o->omega_c;
    double lam = 0.0;
    for (const auto& m : model.modes()) lam += 0.5 * m.c * m.c / m.omega;
    return lam;
}

double cutoff_scale(const SpectralDensityModel& model) {
    if (auto* d = std::get_if<DrudeLorentz>(&model.form)) return d->gamma_c;
    if (auto* b = std::get_if<BrownianOscillator>(&model.form))
        return b->omega0 + b->zeta;
    if (auto* o = std::get_if<OhmicExponential>(&model.form)) return o->omega_c;
    double wmax = 0.0;
    for (const auto& m : model.modes()) wmax = std::max(wmax, m.omega);
    return wmax;
}

Complex correlation_function(const SpectralDensityModel& model,
                             const BathThermalState& state, double t) {
    if (!state.zero_t() && state.beta <= 0)
        throw Error("correlation_function: beta must be > 0 or infinite");
    if (t < 0.0) return std::conj(correlation_function(model, state, -t));
    if (model.is_discrete()) return corr_discrete(model.modes(), state, t);
    return corr_continuous(model, state, t);
}

SpectralDensityModel discretize_bath(const SpectralDensityModel& model,
                                     const BathThermalState& state, int n_modes,
                                     DiscretizationScheme scheme) {
    if (model.is_discrete()) throw Error("discretize_bath: model is already discrete");
    if (n_modes < 1) throw Error("discretize_bath: mode count must be >= 1");
    (void)state; // temperature enters through the correlation function, not J

    const double omega_max = 10.0 * cutoff_scale(model);
    const double lam = reorganization_energy(model);
    std::vector<DiscreteMode> modes(n_modes);

    if (scheme == DiscretizationScheme::gauss_legendre) {
        auto [x, w] = quad::gauss_legendre(n_modes);
        for (int j = 0; j < n_modes; ++j) {
            const double wj = 0.5 * omega_max * (x[j] + 1.0);
            const double wt = 0.5 * omega_max * w[j];
            modes[j] = {std::sqrt(2.0 / M_PI * wt * j_over_w(model, wj) * wj), wj};
        }
        return SpectralDensityModel::discrete(std::move(modes));
    }

    // equal-reorganization: split [0, omega_max] into bins of equal
    // (1/pi) Int J/w, take the J-weighted mean frequency per bin, assign each
    // mode lambda/N so the sum rule holds exactly.
    auto reorg_to = [&](double w) {
        auto r = quad::integrate(
            [&](double x) -> Complex { return j_over_w(model, x) / M_PI; }, 0.0, w,
            1e-14 * (1 + lam), 1e-12);
        return r.value.real();
    };
    const double inside = reorg_to(omega_max);
    std::vector<double> edges(n_modes + 1);
    edges[0] = 0.0;
    edges[n_modes] = omega_max;
    for (int j = 1; j < n_modes; ++j) {
        const double target = inside * j / n_modes;
        double lo = edges[j - 1], hi = omega_max;
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * omega_max; ++it) {
            const double mid = 0.5 * (lo + hi);
            (reorg_to(mid) < target ? lo : hi) = mid;
        }
        edges[j] = 0.5 * (lo + hi);
    }
    for (int j = 0; j < n_modes; ++j) {
        auto num = quad::integrate(
            [&](double x) -> Complex { return j_over_w(model, x) * x; }, edges[j],
            edges[j + 1], 1e-14 * (1 + lam), 1e-12);
        auto den = quad::integrate(
            [&](double x) -> Complex { return j_over_w(model, x); }, edges[j],
            edges[j + 1], 1e-14 * (1 + lam), 1e-12);
        const double wj = num.value.real() / den.value.real();
        modes[j] = {std::sqrt(2.0 * wj * lam / n_modes), wj};
    }
    return SpectralDensityModel::discrete(std::move(modes));
}

} // namespace odo
