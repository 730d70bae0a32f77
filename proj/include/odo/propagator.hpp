#pragma once

#include <memory>
#include <vector>

#include "odo/dynamics.hpp"
#include "odo/state.hpp"

namespace odo {

enum class StepMethod { rk4, rk45 };

struct PropagationConfig {
    double t_final = 0.0;
    StepMethod method = StepMethod::rk45;
    double dt = 0.0;          // fixed step (rk4)
    double rtol = 1e-8;       // adaptive tolerances (rk45)
    double atol = 1e-12;
    std::vector<double> snapshot_times; // sorted, within [0, t_final]
    std::size_t max_steps = 50'000'000;
    bool store_full = false;            // keep full ODO snapshots, not just tier-0
    double trace_drift_abort = 1e-8;    // tier-0 trace drift monitor, breach aborts

    void validate() const;
};

struct Snapshot {
    double t = 0.0;
    Matrix reduced; // tier-0 block (scale 1 by construction)
    std::shared_ptr<const ODOState> full;
};

struct Telemetry {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
    double max_trace_drift = 0.0;
    double max_herm_defect = 0.0;
    double min_dt = 0.0;
    double max_dt = 0.0;
    double wall_seconds = 0.0;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    Telemetry telemetry;
};

// Integrate d rho/dt = rhs(rho) from t = 0, stepping exactly onto snapshot
// times. rk45 is Dormand-Prince 5(4) with the error norm taken as the max
// over blocks of the RMS entrywise error scaled by atol + rtol |entry|.
Trajectory propagate(const ODOState& state0, const RhsGenerator& rhs,
                     const PropagationConfig& config);

} // namespace odo
