#include "odo/propagator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "odo/system.hpp"
#include "parallel.hpp"

namespace odo {

namespace {

// Dormand-Prince 5(4)
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Work {
    std::vector<ODOState> k; // stage derivatives
    ODOState tmp, err;
};

void lincomb(ODOState& dst, const ODOState& y, double dt,
             std::initializer_list<std::pair<double, const ODOState*>> terms) {
    const std::size_t n = dst.entries();
    Complex* d = dst.data();
    const Complex* yp = y.data();
    for (std::size_t i = 0; i < n; ++i) d[i] = yp[i];
    for (auto& [c, s] : terms) {
        const Complex* sp = s->data();
        const double w = dt * c;
        for (std::size_t i = 0; i < n; ++i) d[i] += w * sp[i];
    }
}

// max over blocks of RMS entry error scaled by atol + rtol |entry|
double error_norm(const ODOState& err, const ODOState& y0, const ODOState& y1,
                  double atol, double rtol) {
    const int dd = y0.dim() * y0.dim();
    double worst = 0.0;
    for (std::size_t blk = 0; blk < y0.block_count(); ++blk) {
        const Complex* e = err.block(std::uint32_t(blk));
        const Complex* a = y0.block(std::uint32_t(blk));
        const Complex* b = y1.block(std::uint32_t(blk));
        double acc = 0.0;
        for (int i = 0; i < dd; ++i) {
            const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double r = std::abs(e[i]) / sc;
            acc += r * r;
        }
        worst = std::max(worst, acc / dd);
    }
    return std::sqrt(worst);
}

bool finite(const ODOState& s) {
    const Complex* p = s.data();
    for (std::size_t i = 0; i < s.entries(); ++i)
        if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag())) return false;
    return true;
}

} // namespace

void PropagationConfig::validate() const {
    if (t_final <= 0) throw Error("propagation: t_final must be > 0");
    if (method == StepMethod::rk4 && dt <= 0)
        throw Error("propagation: fixed-step mode needs dt > 0");
    if (method == StepMethod::rk45 && (rtol <= 0 || atol <= 0))
        throw Error("propagation: adaptive mode needs rtol, atol > 0");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        if (snapshot_times[i] < 0 || snapshot_times[i] > t_final + 1e-12)
            throw Error("propagation: snapshot times must lie in [0, t_final]");
        if (i > 0 && snapshot_times[i] < snapshot_times[i - 1])
            throw Error("propagation: snapshot times must be sorted");
    }
}

Trajectory propagate(const ODOState& state0, const RhsGenerator& rhs,
                     const PropagationConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    Trajectory traj;
    ODOState y = state0;
    const int d = y.dim();
    const Complex tr0 = y.block_matrix(0).trace();

    auto record = [&](double t) {
        Snapshot s;
        s.t = t;
        s.reduced = y.block_matrix(0);
        if (config.store_full) s.full = std::make_shared<ODOState>(y);
        traj.snapshots.push_back(std::move(s));
    };
    auto monitor = [&](double t) {
        if (!finite(y))
            throw NonFiniteState("propagate: non-finite state at t = " + std::to_string(t), t);
        const double drift = std::abs(y.block_matrix(0).trace() - tr0);
        traj.telemetry.max_trace_drift = std::max(traj.telemetry.max_trace_drift, drift);
        traj.telemetry.max_herm_defect = std::max(
            traj.telemetry.max_herm_defect, hermiticity_defect(y.block_matrix(0)));
        if (drift > config.trace_drift_abort)
            throw Error("propagate: tier-0 trace drift " + std::to_string(drift) +
                        " exceeded " + std::to_string(config.trace_drift_abort) +
                        " at t = " + std::to_string(t));
    };

    std::size_t next_snap = 0;
    while (next_snap < config.snapshot_times.size() &&
           config.snapshot_times[next_snap] <= 0.0) {
        record(0.0);
        ++next_snap;
    }

    const bool adaptive = (config.method == StepMethod::rk45);
    ODOState k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y,
             yerr = y;

    double dt;
    if (adaptive) {
        const double h = rhs.h_norm() > 0 ? 0.01 / rhs.h_norm() : config.t_final;
        const double g = rhs.gamma_max() > 0 ? 0.1 / rhs.gamma_max() : config.t_final;
        dt = std::min({h, g, config.t_final});
    } else {
        dt = config.dt;
    }
    traj.telemetry.min_dt = dt;

    double t = 0.0;
    bool have_k1 = false;
    while (t < config.t_final - 1e-14 * config.t_final) {
        if (traj.telemetry.steps + traj.telemetry.rejected >= config.max_steps)
            throw StepLimitExceeded("propagate: exceeded max_steps at t = " +
                                    std::to_string(t));
        double target = config.t_final;
        if (next_snap < config.snapshot_times.size())
            target = std::min(target, config.snapshot_times[next_snap]);
        double h = std::min(dt, target - t);
        if (h <= 0) h = dt;

        if (!adaptive) {
            // classic RK4
            rhs.apply(y, k1);
            lincomb(ytmp, y, h, {{0.5, &k1}});
            rhs.apply(ytmp, k2);
            lincomb(ytmp, y, h, {{0.5, &k2}});
            rhs.apply(ytmp, k3);
            lincomb(ytmp, y, h, {{1.0, &k3}});
            rhs.apply(ytmp, k4);
            lincomb(y, y, h / 6.0,
                    {{1.0, &k1}, {2.0, &k2}, {2.0, &k3}, {1.0, &k4}});
            traj.telemetry.rhs_evals += 4;
            t += h;
            ++traj.telemetry.steps;
            traj.telemetry.min_dt = std::min(traj.telemetry.min_dt, h);
            traj.telemetry.max_dt = std::max(traj.telemetry.max_dt, h);
            monitor(t);
        } else {
            if (!have_k1) {
                rhs.apply(y, k1);
                ++traj.telemetry.rhs_evals;
                have_k1 = true;
            }
            lincomb(ytmp, y, h, {{a21, &k1}});
            rhs.apply(ytmp, k2);
            lincomb(ytmp, y, h, {{a31, &k1}, {a32, &k2}});
            rhs.apply(ytmp, k3);
            lincomb(ytmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
            rhs.apply(ytmp, k4);
            lincomb(ytmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
            rhs.apply(ytmp, k5);
            lincomb(ytmp, y, h,
                    {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
            rhs.apply(ytmp, k6);
            lincomb(ynew, y, h,
                    {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            rhs.apply(ynew, k7); // FSAL
            traj.telemetry.rhs_evals += 6;
            lincomb(yerr, ynew, h,
                    {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
            // yerr currently holds ynew + h*e·k; subtract ynew to get the error
            {
                Complex* ep = yerr.data();
                const Complex* np = ynew.data();
                for (std::size_t i = 0; i < yerr.entries(); ++i) ep[i] -= np[i];
            }
            const double err = error_norm(yerr, y, ynew, config.atol, config.rtol);
            if (err <= 1.0) {
                std::swap(y, ynew);
                std::swap(k1, k7); // FSAL reuse
                t += h;
                ++traj.telemetry.steps;
                traj.telemetry.min_dt = std::min(traj.telemetry.min_dt, h);
                traj.telemetry.max_dt = std::max(traj.telemetry.max_dt, h);
                monitor(t);
            } else {
                ++traj.telemetry.rejected;
                have_k1 = true; // k1 still valid for the same y
            }
            const double fac =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            dt = std::min(h * fac, config.t_final);
        }

        while (next_snap < config.snapshot_times.size() &&
               t >= config.snapshot_times[next_snap] - 1e-12) {
            record(config.snapshot_times[next_snap]);
            ++next_snap;
        }
    }
    while (next_snap < config.snapshot_times.size()) {
        record(config.snapshot_times[next_snap]);
        ++next_snap;
    }

    traj.telemetry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return traj;
}

} // namespace odo
