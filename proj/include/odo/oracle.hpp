#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "odo/bath.hpp"
#include "odo/system.hpp"
#include "odo/types.hpp"

namespace odo {

// Truncated-Fock description of a discrete bath: `cutoff` levels per mode.
struct FockConfig {
    std::vector<DiscreteMode> modes;
    int cutoff = 8;
    double beta = 1.0;
    std::size_t dim_budget = 4096; // d * M^N cap
};

enum class OracleMethod { eigen, rk45 };

struct OracleTrajectory {
    std::vector<double> times;
    std::vector<Matrix> reduced;
    std::vector<double> purity;
    double max_leakage = 0.0;      // top Fock level population, any mode/time
    double max_trace_defect = 0.0; // |tr rho_T - 1|
    double max_herm_defect = 0.0;  // ||rho_T - rho_T^+||_F
};

// Dense von Neumann evolution of system (x) truncated Fock bath from
// rho_S(0) (x) e^{-beta H_B}/Z_B. The eigen method diagonalizes H once and
// reconstructs snapshots exactly; rk45 reuses the shared propagator.
class DenseOracle {
public:
    DenseOracle(const SystemSpec& sys, const FockConfig& fock, const Matrix& rho_s0);

    int system_dim() const { return d_; }
    int bath_dim() const { return db_; }
    int total_dim() const { return d_ * db_; }
    const Matrix& hamiltonian() const { return h_; }
    const Matrix& coupling_mode() const { return f_; } // bath-space F

    OracleTrajectory evolve(const std::vector<double>& times,
                            OracleMethod method = OracleMethod::eigen,
                            double leakage_threshold = 1e-6, double rtol = 1e-9,
                            double atol = 1e-12);

    // Thermofield slots in discrete_to_decomposition term order: per mode the
    // (b, +i w) slot then, at finite temperature, the (b', -i w) slot.
    struct Slot {
        int mode;
        bool primed;
    };
    std::vector<Slot> thermofield_slots(bool keep_zero_amplitude = false) const;

    // Ordered moment tr_B[N(prod_k d_k^{u_k} d_k^{+ v_k}) rho_T(t)] as a d x d
    // matrix; u, v indexed by thermofield_slots(). Evaluated by reduction to
    // original-space propagations of ladder-modified initial states; queries
    // grouped by equal t reuse cached reconstructions.
    Matrix ordered_moment(const std::vector<int>& u, const std::vector<int>& v, double t,
                          bool keep_zero_amplitude = false);

    // Direct expectation Tr[(a_s (x) F^p) rho_T(t)], p = 0, 1, 2.
    Complex f_moment(const Matrix& a_s, int f_power, double t);

    // Full density matrix at t (eigen reconstruction).
    Matrix full_state(double t);

private:
    SystemSpec sys_;
    FockConfig fock_;
    int d_ = 0, db_ = 0;
    Matrix h_;       // total Hamiltonian
    Matrix f_;       // bath-space interaction mode
    Matrix rho0_;    // total initial state
    std::vector<double> nbar_;

    // eigendecomposition cache
    bool eig_ready_ = false;
    Matrix evec_;
    RealVector eval_;
    void ensure_eig();
    Matrix rotate_initial(const Matrix& init); // U^+ init U
    Matrix phases_at(const Matrix& rotated, double t) const;
    Matrix reconstruct(const Matrix& rotated, double t); // U B U^+

    struct LadderOp {
        int mode;
        bool dagger;
    };
    Matrix apply_ladder_left(const std::vector<LadderOp>& ops, const Matrix& m) const;
    Matrix partial_trace(const Matrix& total) const;

    std::map<std::string, Matrix> rotated_cache_; // key: G string
    double cache_t_ = -1.0;
    std::map<std::string, Matrix> time_cache_;
};

// Exact pure-dephasing solution for diagonal H_S and diagonal Q:
//   rho_ab(t) = rho_ab(0) e^{-i(h_a - h_b)t}
//                 exp[-(q_a - q_b)(q_a I(t) - q_b I(t)^*)],
//   I(t) = Int_0^t (t - tau) C(tau) d tau.
// Populations constant. Throws NotDephasing unless [H_S, Q] = 0 with both
// diagonal.
Matrix analytic_dephasing(const SystemSpec& sys, const SpectralDensityModel& model,
                          const BathThermalState& state, const Matrix& rho0, double t);

// Same on a sorted time grid, accumulating the kernel integrals segment by
// segment (one quadrature pass over [0, t_max]).
std::vector<Matrix> analytic_dephasing_series(const SystemSpec& sys,
                                              const SpectralDensityModel& model,
                                              const BathThermalState& state,
                                              const Matrix& rho0,
                                              const std::vector<double>& times);

} // namespace odo
