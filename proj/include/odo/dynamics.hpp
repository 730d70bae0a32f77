#pragma once

#include <memory>
#include <vector>

#include "odo/decomp.hpp"
#include "odo/hierarchy.hpp"
#include "odo/state.hpp"
#include "odo/system.hpp"

namespace odo {

enum class Rescale { off, on, auto_default };

// Matrix-free linear generator: out = L(in). Input immutable during apply;
// output blocks written disjointly, so RHS application may fan out over
// ordinals without synchronization.
class RhsGenerator {
public:
    virtual ~RhsGenerator() = default;
    virtual void apply(const ODOState& in, ODOState& out) const = 0;

    const HierarchySpace& space() const { return *space_; }
    int dim() const { return d_; }
    double h_norm() const { return h_norm_; }
    double gamma_max() const { return gamma_max_; }
    bool rescaled() const { return static_cast<bool>(scales_); }
    std::shared_ptr<const std::vector<double>> scales() const { return scales_; }

    // Initial condition with this generator's scaling attached.
    ODOState make_initial(const Matrix& rho0) const;

    void set_threads(int n) { threads_ = n; }
    int threads() const { return threads_; }

protected:
    const HierarchySpace* space_ = nullptr;
    int d_ = 0;
    double h_norm_ = 0.0;
    double gamma_max_ = 0.0;
    std::shared_ptr<const std::vector<double>> scales_;
    int threads_ = 1;

    void check_state(const ODOState& in, const ODOState& out) const;
};

// Double-side hierarchy for a discrete bath, Eq.-(11)-style coefficients
// (zeta_k = sqrt(eta_k) real, epsilon_k = Im gamma_k). Rescaling default off.
class DiscreteDoubleGenerator : public RhsGenerator {
public:
    DiscreteDoubleGenerator(const HierarchySpace& space, const SystemSpec& sys,
                            const BathDecomposition& dec,
                            Rescale rescale = Rescale::auto_default);
    void apply(const ODOState& in, ODOState& out) const override;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Double-side hierarchy with complex (eta_k, gamma_k). Rescaling default on.
class ContinuousDoubleGenerator : public RhsGenerator {
public:
    ContinuousDoubleGenerator(const HierarchySpace& space, const SystemSpec& sys,
                              const BathDecomposition& dec,
                              Rescale rescale = Rescale::auto_default);
    void apply(const ODOState& in, ODOState& out) const override;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Single-side dissipaton hierarchy; requires total pairing. Rescaling default
// on for continuous origins, off for discrete.
class SingleSideGenerator : public RhsGenerator {
public:
    SingleSideGenerator(const HierarchySpace& space, const SystemSpec& sys,
                        const BathDecomposition& dec,
                        Rescale rescale = Rescale::auto_default);
    void apply(const ODOState& in, ODOState& out) const override;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Quadratic-coupling extension: effective Hamiltonian
// H_S + alpha0 Q0 + alpha2 <F^2> Q2, single-side linear ladder with alpha1 Q1,
// and double raise/lower terms with alpha2 Q2.
class QuadraticGenerator : public RhsGenerator {
public:
    QuadraticGenerator(const HierarchySpace& space, const SystemSpec& sys,
                       const BathDecomposition& dec, Complex f2_mean,
                       Rescale rescale = Rescale::auto_default);
    void apply(const ODOState& in, ODOState& out) const override;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// Dense von Neumann commutator -i[H, rho] on a single block (oracle and
// closed-system propagation reuse the same propagator machinery).
class DenseCommutatorGenerator : public RhsGenerator {
public:
    DenseCommutatorGenerator(const HierarchySpace& single_block_space, const Matrix& h);
    void apply(const ODOState& in, ODOState& out) const override;

private:
    Matrix h_;
};

} // namespace odo
