#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "odo/bath.hpp"
#include "odo/errors.hpp"
#include "odo/types.hpp"

namespace odo {

struct DecompTerm {
    Complex eta;
    Complex gamma;
};

struct DecompositionReport {
    double max_residual = 0.0;
    double horizon = 0.0;
    int samples = 0;
    double scale = 0.0;      // max |C| over the certification grid
    int discarded_roots = 0; // growing exponentials dropped by prony_fit
};

enum class DecompOrigin { matsubara, pade, prony, discrete };

// C(t) ~ Sum_k eta_k e^{-gamma_k t} for t > 0, with phases theta_k = arg eta_k
// and a (possibly partial) conjugate-pairing map kbar.
struct BathDecomposition {
    std::vector<DecompTerm> terms;
    std::vector<Complex> sqrt_eta; // principal branch, fixed at construction
    std::vector<int> kbar;         // -1 where unpaired
    DecompOrigin origin = DecompOrigin::discrete;
    std::optional<DecompositionReport> report;

    int size() const { return static_cast<int>(terms.size()); }
    bool pairing_total() const;
    double theta(int k) const { return std::arg(terms[k].eta); }
    Complex sum_eta() const;

    static BathDecomposition from_terms(std::vector<DecompTerm> terms, DecompOrigin origin);
};

// Thermofield terms of a discrete bath: per mode, (c^2(nbar+1)/2, +i w) and
// (c^2 nbar/2, -i w), interleaved; exact-zero amplitudes dropped unless kept.
BathDecomposition discrete_to_decomposition(const SpectralDensityModel& model,
                                            const BathThermalState& state,
                                            bool keep_zero_amplitude = false);

// Drude pole + K Matsubara terms via residues of the FDT integral.
BathDecomposition matsubara_decomposition(const SpectralDensityModel& model,
                                          const BathThermalState& state, int k_terms);

// J poles + K Pade ([N-1/N] bosonic PSD) kernel poles.
BathDecomposition pade_decomposition(const SpectralDensityModel& model,
                                     const BathThermalState& state, int k_pairs);

// Least-squares Prony fit of uniformly sampled C(t): Hankel system, companion
// roots, Vandermonde amplitudes. Roots with |z| > 1 are discarded and counted.
BathDecomposition prony_fit(const std::vector<double>& times,
                            const std::vector<Complex>& samples, int k_terms);

// Totalize the pairing involution (|gamma_kbar - gamma_k*| <= tol, real-gamma
// terms self-paired) or throw UnpairedTerms naming the leftovers.
BathDecomposition pairing_map(BathDecomposition dec, double tol = 1e-9);

// Residual certification on t in (0, T] against a reference C(t); attaches the
// report. n_samples grid points, first at T/n.
DecompositionReport certify(BathDecomposition& dec,
                            const std::function<Complex(double)>& c_ref, double horizon,
                            int n_samples = 256);
DecompositionReport certify(BathDecomposition& dec, const SpectralDensityModel& model,
                            const BathThermalState& state, double horizon = 0.0,
                            int n_samples = 256);

// T = 10 / min_k Re' gamma_k, ignoring purely imaginary rates; falls back to
// 10 * 2 pi / min |gamma_k|.
double default_horizon(const BathDecomposition& dec);

Complex decomposition_value(const BathDecomposition& dec, double t);

std::string decomposition_to_json(const BathDecomposition& dec);
BathDecomposition decomposition_from_json(const std::string& text);

} // namespace odo
