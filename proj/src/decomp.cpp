#include "odo/decomp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace odo {

using json = nlohmann::json;

BathDecomposition BathDecomposition::from_terms(std::vector<DecompTerm> terms,
                                                DecompOrigin origin) {
    for (const auto& t : terms)
        if (t.gamma.real() < -1e-12 * std::abs(t.gamma))
            throw Error("decomposition: Re gamma must be >= 0");
    BathDecomposition d;
    d.terms = std::move(terms);
    d.origin = origin;
    d.sqrt_eta.reserve(d.terms.size());
    for (const auto& t : d.terms) d.sqrt_eta.push_back(std::sqrt(t.eta));
    d.kbar.assign(d.terms.size(), -1);
    return d;
}

bool BathDecomposition::pairing_total() const {
    for (int k = 0; k < size(); ++k) {
        if (kbar[k] < 0 || kbar[k] >= size()) return false;
        if (kbar[kbar[k]] != k) return false;
    }
    return true;
}

Complex BathDecomposition::sum_eta() const {
    Complex s{0, 0};
    for (const auto& t : terms) s += t.eta;
    return s;
}

Complex decomposition_value(const BathDecomposition& dec, double t) {
    Complex c{0, 0};
    for (const auto& term : dec.terms) c += term.eta * std::exp(-term.gamma * t);
    return c;
}

BathDecomposition discrete_to_decomposition(const SpectralDensityModel& model,
                                            const BathThermalState& state,
                                            bool keep_zero_amplitude) {
    if (!model.is_discrete())
        throw Error("discrete_to_decomposition: model must be discrete");
    std::vector<DecompTerm> terms;
    for (const auto& m : model.modes()) {
        const double nb = state.nbar(m.omega);
        const double up = 0.5 * m.c * m.c * (nb + 1.0);
        const double dn = 0.5 * m.c * m.c * nb;
        if (up != 0.0 || keep_zero_amplitude)
            terms.push_back({Complex(up, 0.0), Complex(0.0, m.omega)});
        if (dn != 0.0 || keep_zero_amplitude)
            terms.push_back({Complex(dn, 0.0), Complex(0.0, -m.omega)});
    }
    return BathDecomposition::from_terms(std::move(terms), DecompOrigin::discrete);
}

namespace {

// Bosonic [N-1/N] Pade spectrum decomposition of 1/(1-e^{-x}):
//   1/2 + 1/x + Sum_j 2 eta_j x / (x^2 + xi_j^2)
// poles/weights from the symmetric-tridiagonal eigenvalue construction.
void psd_coefficients(int n_pairs, std::vector<double>& xi, std::vector<double>& eta) {
    auto positive_inverses = [](int size, int b_offset) {
        std::vector<double> out;
        if (size < 1) return out;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
        for (int i = 0; i + 1 < size; ++i) {
            const double b =
                1.0 / std::sqrt(double(2 * (i + 1) + b_offset) *
                                double(2 * (i + 2) + b_offset));
            m(i, i + 1) = b;
            m(i + 1, i) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.info() != Eigen::Success)
            throw EigenSolveFailure("psd: tridiagonal eigensolve failed");
        for (int i = 0; i < size; ++i) {
            const double lam = es.eigenvalues()(i);
            if (lam > 1e-12) out.push_back(2.0 / lam);
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    xi = positive_inverses(2 * n_pairs, 1);        // b_m = 2m + 1
    auto zeta = positive_inverses(2 * n_pairs - 1, 3); // b_m = 2m + 3
    if (static_cast<int>(xi.size()) != n_pairs ||
        static_cast<int>(zeta.size()) != n_pairs - 1)
        throw EigenSolveFailure("psd: unexpected eigenvalue multiplicity");

    eta.assign(n_pairs, 0.5 * n_pairs * (2.0 * n_pairs + 3.0));
    for (int j = 0; j < n_pairs; ++j) {
        const double xj2 = xi[j] * xi[j];
        for (double z : zeta) eta[j] *= z * z - xj2;
        for (int q = 0; q < n_pairs; ++q)
            if (q != j) eta[j] /= xi[q] * xi[q] - xj2;
    }
}

// Lower-half-plane poles of rational J with residues.
std::vector<std::pair<Complex, Complex>> j_poles_lower(const SpectralDensityModel& m) {
    if (auto* d = std::get_if<DrudeLorentz>(&m.form))
        return {{Complex(0.0, -d->gamma_c), Complex(d->lambda * d->gamma_c, 0.0)}};
    if (auto* b = std::get_if<BrownianOscillator>(&m.form)) {
        const Complex sq =
            std::sqrt(Complex(b->omega0 * b->omega0 - 0.25 * b->zeta * b->zeta, 0.0));
        const Complex r1 = sq - Complex(0.0, 0.5 * b->zeta);
        const Complex r2 = -sq - Complex(0.0, 0.5 * b->zeta);
        auto residue = [&](Complex wr) {
            const Complex den = 2.0 * wr + Complex(0.0, b->zeta);
            if (std::abs(den) < 1e-9 * (b->omega0 + b->zeta))
                throw ModelUnsupported("pade: critically damped Brownian oscillator");
            return Complex(0.0, 1.0) * b->lambda * b->omega0 * b->omega0 / den;
        };
        return {{r1, residue(r1)}, {r2, residue(r2)}};
    }
    throw ModelUnsupported("decomposition by residues needs a rational J(w)");
}

void check_pole_separation(const std::vector<std::pair<Complex, Complex>>& jp,
                           const std::vector<Complex>& kernel_poles, double scale) {
    for (const auto& [p, r] : jp)
        for (const auto& kp : kernel_poles)
            if (std::abs(p - kp) < 1e-9 * scale)
                throw ModelUnsupported(
                    "decomposition: J pole coincides with a kernel pole (degenerate residue)");
}

} // namespace

BathDecomposition matsubara_decomposition(const SpectralDensityModel& model,
                                          const BathThermalState& state, int k_terms) {
    if (!std::holds_alternative<DrudeLorentz>(model.form))
        throw ModelUnsupported("matsubara_decomposition: Drude-Lorentz only");
    if (state.zero_t()) throw Error("matsubara_decomposition: beta must be finite");
    if (k_terms < 0) throw Error("matsubara_decomposition: K must be >= 0");
    const double beta = state.beta;

    auto jp = j_poles_lower(model);
    std::vector<Complex> kernel_poles;
    for (int n = 1; n <= k_terms; ++n)
        kernel_poles.emplace_back(0.0, -2.0 * M_PI * n / beta);
    check_pole_separation(jp, kernel_poles, cutoff_scale(model));

    std::vector<DecompTerm> terms;
    auto bose = [&](Complex z) {
        return 1.0 / (1.0 - std::exp(-beta * z));
    };
    for (const auto& [p, r] : jp)
        terms.push_back({Complex(0.0, -2.0) * r * bose(p), Complex(0.0, 1.0) * p});
    for (int n = 1; n <= k_terms; ++n) {
        const double nu = 2.0 * M_PI * n / beta;
        const Complex eta =
            Complex(0.0, -2.0 / beta) * spectral_density_rational(model, Complex(0.0, -nu));
        terms.push_back({eta, Complex(nu, 0.0)});
    }
    return BathDecomposition::from_terms(std::move(terms), DecompOrigin::matsubara);
}

BathDecomposition pade_decomposition(const SpectralDensityModel& model,
                                     const BathThermalState& state, int k_pairs) {
    if (!std::holds_alternative<DrudeLorentz>(model.form) &&
        !std::holds_alternative<BrownianOscillator>(model.form))
        throw ModelUnsupported(
            "pade_decomposition: Drude-Lorentz or Brownian oscillator only");
    if (state.zero_t()) throw Error("pade_decomposition: beta must be finite");
    if (k_pairs < 1) throw Error("pade_decomposition: K must be >= 1");
    const double beta = state.beta;

    std::vector<double> xi, wj;
    psd_coefficients(k_pairs, xi, wj);

    auto jp = j_poles_lower(model);
    std::vector<Complex> kernel_poles;
    for (double x : xi) kernel_poles.emplace_back(0.0, -x / beta);
    check_pole_separation(jp, kernel_poles, cutoff_scale(model));

    auto kernel = [&](Complex z) {
        const Complex x = beta * z;
        Complex k = 0.5 + 1.0 / x;
        for (int j = 0; j < k_pairs; ++j)
            k += 2.0 * wj[j] * x / (x * x + xi[j] * xi[j]);
        return k;
    };

    std::vector<DecompTerm> terms;
    for (const auto& [p, r] : jp)
        terms.push_back({Complex(0.0, -2.0) * r * kernel(p), Complex(0.0, 1.0) * p});
    for (int j = 0; j < k_pairs; ++j) {
        const double g = xi[j] / beta;
        const Complex eta = Complex(0.0, -2.0 * wj[j] / beta) *
                            spectral_density_rational(model, Complex(0.0, -g));
        terms.push_back({eta, Complex(g, 0.0)});
    }
    return BathDecomposition::from_terms(std::move(terms), DecompOrigin::pade);
}

BathDecomposition prony_fit(const std::vector<double>& times,
                            const std::vector<Complex>& samples, int k_terms) {
    const int n = static_cast<int>(samples.size());
    if (k_terms < 1) throw Error("prony_fit: K must be >= 1");
    if (n < 2 * k_terms || times.size() != samples.size())
        throw Error("prony_fit: need at least 2K uniform samples");
    const double dt = times[1] - times[0];
    if (dt <= 0) throw Error("prony_fit: times must increase");
    for (int i = 1; i < n; ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * dt)
            throw Error("prony_fit: samples must lie on a uniform grid");

    // Hankel least squares for the characteristic polynomial
    const int rows = n - k_terms;
    Matrix a(rows, k_terms);
    Vector b(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < k_terms; ++j) a(i, j) = samples[i + j];
        b(i) = -samples[i + k_terms];
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(sv.size() - 1) / sv(0) < 1e-12)
        throw IllConditioned("prony_fit: Hankel system is rank deficient");
    Vector coeff = svd.solve(b);

    // companion-matrix roots of z^K + c_{K-1} z^{K-1} + ... + c_0
    Matrix comp = Matrix::Zero(k_terms, k_terms);
    for (int i = 1; i < k_terms; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < k_terms; ++i) comp(i, k_terms - 1) = -coeff(i);
    Eigen::ComplexEigenSolver<Matrix> es(comp);
    if (es.info() != Eigen::Success)
        throw EigenSolveFailure("prony_fit: companion eigensolve failed");

    std::vector<Complex> roots;
    int discarded = 0;
    for (int i = 0; i < k_terms; ++i) {
        const Complex z = es.eigenvalues()(i);
        if (std::abs(z) > 1.0 + 1e-9 || std::abs(z) < 1e-300)
            ++discarded;
        else
            roots.push_back(z);
    }
    if (roots.empty()) throw UnstableRoots("prony_fit: all roots grow");

    // least-squares amplitudes on the sample grid
    const int r = static_cast<int>(roots.size());
    Matrix vand(n, r);
    for (int k = 0; k < r; ++k) {
        Complex p{1.0, 0.0};
        for (int i = 0; i < n; ++i) {
            vand(i, k) = p;
            p *= roots[k];
        }
    }
    Vector rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = samples[i];
    Vector w = vand.colPivHouseholderQr().solve(rhs);

    std::vector<DecompTerm> terms(r);
    for (int k = 0; k < r; ++k) {
        Complex gamma = -std::log(roots[k]) / dt;
        if (gamma.real() < 0.0) gamma = Complex(0.0, gamma.imag()); // |z| <= 1 + tol
        const Complex eta = w(k) * std::exp(gamma * times[0]);
        terms[k] = {eta, gamma};
    }
    auto dec = BathDecomposition::from_terms(std::move(terms), DecompOrigin::prony);

    DecompositionReport rep;
    rep.horizon = times.back();
    rep.samples = n;
    rep.discarded_roots = discarded;
    for (int i = 0; i < n; ++i) {
        rep.max_residual = std::max(
            rep.max_residual, std::abs(decomposition_value(dec, times[i]) - samples[i]));
        rep.scale = std::max(rep.scale, std::abs(samples[i]));
    }
    dec.report = rep;
    return dec;
}

BathDecomposition pairing_map(BathDecomposition dec, double tol) {
    const int k = dec.size();
    std::vector<int> kbar(k, -1);
    for (int i = 0; i < k; ++i) {
        if (kbar[i] >= 0) continue;
        int best = -1;
        double best_d = tol;
        for (int j = i; j < k; ++j) {
            if (kbar[j] >= 0) continue;
            const double d = std::abs(dec.terms[j].gamma - std::conj(dec.terms[i].gamma));
            if (d <= best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best >= 0) {
            kbar[i] = best;
            kbar[best] = i;
        }
    }
    std::vector<int> unpaired;
    for (int i = 0; i < k; ++i)
        if (kbar[i] < 0) unpaired.push_back(i);
    if (!unpaired.empty()) {
        std::string msg = "pairing_map: unpaired terms";
        for (int i : unpaired) msg += " " + std::to_string(i);
        throw UnpairedTerms(msg, unpaired);
    }
    dec.kbar = std::move(kbar);
    return dec;
}

double default_horizon(const BathDecomposition& dec) {
    double re_min = 0.0;
    double abs_min = 0.0;
    for (const auto& t : dec.terms) {
        const double re = t.gamma.real();
        const double am = std::abs(t.gamma);
        if (re > 1e-12 * am && (re_min == 0.0 || re < re_min)) re_min = re;
        if (am > 0 && (abs_min == 0.0 || am < abs_min)) abs_min = am;
    }
    if (re_min > 0) return 10.0 / re_min;
    if (abs_min > 0) return 10.0 * 2.0 * M_PI / abs_min;
    return 10.0;
}

DecompositionReport certify(BathDecomposition& dec,
                            const std::function<Complex(double)>& c_ref, double horizon,
                            int n_samples) {
    if (horizon <= 0) horizon = default_horizon(dec);
    DecompositionReport rep;
    rep.horizon = horizon;
    rep.samples = n_samples;
    if (dec.report) rep.discarded_roots = dec.report->discarded_roots;
    for (int i = 1; i <= n_samples; ++i) {
        const double t = horizon * i / n_samples;
        const Complex ref = c_ref(t);
        rep.max_residual =
            std::max(rep.max_residual, std::abs(decomposition_value(dec, t) - ref));
        rep.scale = std::max(rep.scale, std::abs(ref));
    }
    dec.report = rep;
    return rep;
}

DecompositionReport certify(BathDecomposition& dec, const SpectralDensityModel& model,
                            const BathThermalState& state, double horizon,
                            int n_samples) {
    return certify(
        dec, [&](double t) { return correlation_function(model, state, t); }, horizon,
        n_samples);
}

namespace {
const char* origin_name(DecompOrigin o) {
    switch (o) {
        case DecompOrigin::matsubara: return "matsubara";
        case DecompOrigin::pade: return "pade";
        case DecompOrigin::prony: return "prony";
        default: return "discrete";
    }
}
DecompOrigin origin_from(const std::string& s) {
    if (s == "matsubara") return DecompOrigin::matsubara;
    if (s == "pade") return DecompOrigin::pade;
    if (s == "prony") return DecompOrigin::prony;
    if (s == "discrete") return DecompOrigin::discrete;
    throw Error("decomposition: unknown origin '" + s + "'");
}
} // namespace

std::string decomposition_to_json(const BathDecomposition& dec) {
    json j;
    j["origin"] = origin_name(dec.origin);
    j["terms"] = json::array();
    for (int k = 0; k < dec.size(); ++k) {
        j["terms"].push_back({{"eta_re", dec.terms[k].eta.real()},
                              {"eta_im", dec.terms[k].eta.imag()},
                              {"gamma_re", dec.terms[k].gamma.real()},
                              {"gamma_im", dec.terms[k].gamma.imag()},
                              {"kbar", dec.kbar[k]}});
    }
    if (dec.report) {
        j["report"] = {{"max_residual", dec.report->max_residual},
                       {"horizon", dec.report->horizon},
                       {"samples", dec.report->samples},
                       {"scale", dec.report->scale},
                       {"discarded_roots", dec.report->discarded_roots}};
    }
    return j.dump(2);
}

BathDecomposition decomposition_from_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<DecompTerm> terms;
    std::vector<int> kbar;
    for (const auto& t : j.at("terms")) {
        terms.push_back({Complex(t.at("eta_re").get<double>(), t.at("eta_im").get<double>()),
                         Complex(t.at("gamma_re").get<double>(),
                                 t.at("gamma_im").get<double>())});
        kbar.push_back(t.at("kbar").get<int>());
    }
    auto dec = BathDecomposition::from_terms(std::move(terms),
                                             origin_from(j.at("origin").get<std::string>()));
    dec.kbar = std::move(kbar);
    if (j.contains("report")) {
        DecompositionReport rep;
        rep.max_residual = j["report"].at("max_residual").get<double>();
        rep.horizon = j["report"].at("horizon").get<double>();
        rep.samples = j["report"].at("samples").get<int>();
        rep.scale = j["report"].at("scale").get<double>();
        rep.discarded_roots = j["report"].at("discarded_roots").get<int>();
        dec.report = rep;
    }
    return dec;
}

} // namespace odo
