#include "odo/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "odo/dynamics.hpp"
#include "odo/propagator.hpp"
#include "quadrature.hpp"

namespace odo {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

DenseOracle::DenseOracle(const SystemSpec& sys, const FockConfig& fock,
                         const Matrix& rho_s0)
    : sys_(sys), fock_(fock) {
    sys_.validate();
    d_ = sys.d;
    const int n_modes = static_cast<int>(fock.modes.size());
    if (n_modes < 1) throw Error("oracle: need at least one mode");
    if (fock.cutoff < 2) throw Error("oracle: cutoff must be >= 2");
    double dim = d_;
    for (int j = 0; j < n_modes; ++j) dim *= fock.cutoff;
    if (dim > double(fock.dim_budget))
        throw DimensionBudget("oracle: total dimension " + std::to_string(dim) +
                              " exceeds budget " + std::to_string(fock.dim_budget));
    db_ = static_cast<int>(dim / d_ + 0.5);
    const int m = fock.cutoff;

    // bath-space ladder operators; mode j varies with stride m^j
    auto mode_occ = [&](int b, int j) {
        int x = b;
        for (int k = 0; k < j; ++k) x /= m;
        return x % m;
    };
    std::vector<int> stride(n_modes, 1);
    for (int j = 1; j < n_modes; ++j) stride[j] = stride[j - 1] * m;

    f_ = Matrix::Zero(db_, db_);
    Matrix h_b = Matrix::Zero(db_, db_);
    Matrix therm = Matrix::Zero(db_, db_);
    nbar_.resize(n_modes);
    BathThermalState st{fock.beta};
    for (int j = 0; j < n_modes; ++j) nbar_[j] = st.nbar(fock.modes[j].omega);

    double z = 0.0;
    for (int b = 0; b < db_; ++b) {
        double e = 0.0;
        for (int j = 0; j < n_modes; ++j) e += fock.modes[j].omega * mode_occ(b, j);
        h_b(b, b) = e;
        const double w = st.zero_t() ? (e == 0.0 ? 1.0 : 0.0) : std::exp(-fock.beta * e);
        therm(b, b) = w;
        z += w;
        for (int j = 0; j < n_modes; ++j) {
            const int nj = mode_occ(b, j);
            if (nj > 0) {
                // x_j = (a_j + a_j^+)/sqrt(2): <b - stride | a_j | b> = sqrt(nj)
                const double amp = fock.modes[j].c * std::sqrt(0.5 * nj);
                f_(b - stride[j], b) += amp;
                f_(b, b - stride[j]) += amp;
            }
        }
    }
    therm /= z;

    const Matrix id_b = Matrix::Identity(db_, db_);
    const Matrix id_s = Matrix::Identity(d_, d_);
    h_ = kron(sys_.h_s, id_b) + kron(id_s, h_b);
    if (sys_.has_quadratic) {
        if (sys_.alpha0 != 0.0) h_ += sys_.alpha0 * kron(sys_.q0, id_b);
        if (sys_.alpha1 != 0.0) h_ += sys_.alpha1 * kron(sys_.q1, f_);
        if (sys_.alpha2 != 0.0) h_ += sys_.alpha2 * kron(sys_.q2, f_ * f_);
    } else {
        h_ += kron(sys_.q, f_);
    }

    if (rho_s0.rows() != d_ || rho_s0.cols() != d_)
        throw ShapeMismatch("oracle: rho_S(0) dimension mismatch");
    rho0_ = kron(rho_s0, therm);
}

void DenseOracle::ensure_eig() {
    if (eig_ready_) return;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_);
    if (es.info() != Eigen::Success)
        throw EigenSolveFailure("oracle: Hamiltonian eigensolve failed");
    evec_ = es.eigenvectors();
    eval_ = es.eigenvalues();
    eig_ready_ = true;
}

Matrix DenseOracle::rotate_initial(const Matrix& init) {
    ensure_eig();
    return evec_.adjoint() * init * evec_;
}

Matrix DenseOracle::phases_at(const Matrix& rotated, double t) const {
    const int n = total_dim();
    Matrix b(n, n);
    Vector ph(n);
    for (int i = 0; i < n; ++i) ph(i) = std::exp(Complex(0.0, -eval_(i) * t));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = ph(i) * rotated(i, j) * std::conj(ph(j));
    return b;
}

Matrix DenseOracle::reconstruct(const Matrix& rotated, double t) {
    ensure_eig();
    return evec_ * phases_at(rotated, t) * evec_.adjoint();
}

Matrix DenseOracle::partial_trace(const Matrix& total) const {
    Matrix out = Matrix::Zero(d_, d_);
    for (int s = 0; s < d_; ++s)
        for (int sp = 0; sp < d_; ++sp)
            for (int b = 0; b < db_; ++b) out(s, sp) += total(s * db_ + b, sp * db_ + b);
    return out;
}

Matrix DenseOracle::full_state(double t) {
    return reconstruct(rotate_initial(rho0_), t);
}

OracleTrajectory DenseOracle::evolve(const std::vector<double>& times,
                                     OracleMethod method, double leakage_threshold,
                                     double rtol, double atol) {
    OracleTrajectory out;
    out.times = times;
    const int n_modes = static_cast<int>(fock_.modes.size());
    const int m = fock_.cutoff;

    // top-level projector diagonal per mode, in the product basis
    auto top_level = [&](int b, int j) {
        int x = b;
        for (int k = 0; k < j; ++k) x /= m;
        return (x % m) == m - 1;
    };

    if (method == OracleMethod::eigen) {
        ensure_eig();
        const Matrix rot = rotate_initial(rho0_);
        // W(s,s') = U_blk(s')^+ U_blk(s) turns partial traces into Frobenius
        // products in the eigenbasis; same for the leakage projectors.
        std::vector<Matrix> w(d_ * d_);
        for (int s = 0; s < d_; ++s)
            for (int sp = 0; sp < d_; ++sp)
                w[s * d_ + sp] = evec_.middleRows(sp * db_, db_).adjoint() *
                                 evec_.middleRows(s * db_, db_);
        std::vector<Matrix> wp(n_modes);
        for (int j = 0; j < n_modes; ++j) {
            Matrix p = Matrix::Zero(total_dim(), total_dim());
            for (int s = 0; s < d_; ++s)
                for (int b = 0; b < db_; ++b)
                    if (top_level(b, j)) p(s * db_ + b, s * db_ + b) = 1.0;
            wp[j] = evec_.adjoint() * p * evec_;
        }

        for (double t : times) {
            const Matrix b = phases_at(rot, t);
            Matrix red(d_, d_);
            for (int s = 0; s < d_; ++s)
                for (int sp = 0; sp < d_; ++sp)
                    red(s, sp) = (w[s * d_ + sp].array() * b.transpose().array()).sum();
            out.reduced.push_back(red);
            out.purity.push_back(b.cwiseAbs2().sum());
            out.max_trace_defect =
                std::max(out.max_trace_defect, std::abs(b.trace() - Complex(1, 0)));
            out.max_herm_defect =
                std::max(out.max_herm_defect, (b - b.adjoint()).norm());
            for (int j = 0; j < n_modes; ++j) {
                const double leak =
                    ((wp[j].array() * b.transpose().array()).sum()).real();
                out.max_leakage = std::max(out.max_leakage, leak);
            }
        }
    } else {
        const auto space = std::make_shared<HierarchySpace>(
            HierarchySpace::enumerate(1, 0, Side::single));
        DenseCommutatorGenerator gen(*space, h_);
        ODOState st(*space, total_dim(), std::size_t(1) << 28);
        st.block_matrix(0) = rho0_;
        PropagationConfig cfg;
        cfg.t_final = times.empty() ? 1.0 : std::max(times.back(), 1e-9);
        cfg.method = StepMethod::rk45;
        cfg.rtol = rtol;
        cfg.atol = atol;
        cfg.snapshot_times = times;
        cfg.store_full = true;
        cfg.trace_drift_abort = 1e-6;
        auto traj = propagate(st, gen, cfg);
        for (const auto& snap : traj.snapshots) {
            const Matrix& rho = snap.full->block_matrix(0);
            out.reduced.push_back(partial_trace(rho));
            out.purity.push_back((rho * rho).trace().real());
            out.max_trace_defect =
                std::max(out.max_trace_defect, std::abs(rho.trace() - Complex(1, 0)));
            out.max_herm_defect =
                std::max(out.max_herm_defect, (rho - rho.adjoint()).norm());
            for (int j = 0; j < n_modes; ++j) {
                double leak = 0.0;
                for (int s = 0; s < d_; ++s)
                    for (int b = 0; b < db_; ++b)
                        if (top_level(b, j))
                            leak += rho(s * db_ + b, s * db_ + b).real();
                out.max_leakage = std::max(out.max_leakage, leak);
            }
        }
    }
    if (out.max_leakage > leakage_threshold)
        throw LeakageExceeded("oracle: top Fock level population " +
                              std::to_string(out.max_leakage) + " exceeds " +
                              std::to_string(leakage_threshold));
    return out;
}

std::vector<DenseOracle::Slot> DenseOracle::thermofield_slots(
    bool keep_zero_amplitude) const {
    std::vector<Slot> slots;
    for (int j = 0; j < static_cast<int>(fock_.modes.size()); ++j) {
        slots.push_back({j, false});
        if (nbar_[j] > 0.0 || keep_zero_amplitude) slots.push_back({j, true});
    }
    return slots;
}

Matrix DenseOracle::apply_ladder_left(const std::vector<LadderOp>& ops,
                                      const Matrix& m_in) const {
    const int m = fock_.cutoff;
    std::vector<int> stride(fock_.modes.size(), 1);
    for (std::size_t j = 1; j < fock_.modes.size(); ++j) stride[j] = stride[j - 1] * m;
    auto mode_occ = [&](int b, int j) {
        int x = b;
        for (int k = 0; k < j; ++k) x /= m;
        return x % m;
    };
    Matrix cur = m_in;
    // rightmost operator acts first
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        Matrix next = Matrix::Zero(cur.rows(), cur.cols());
        for (int s = 0; s < d_; ++s)
            for (int b = 0; b < db_; ++b) {
                const int occ = mode_occ(b, it->mode);
                if (it->dagger) {
                    // a^+(b + stride, b) = sqrt(occ + 1)
                    if (occ + 1 < m)
                        next.row(s * db_ + b + stride[it->mode]) +=
                            std::sqrt(double(occ + 1)) * cur.row(s * db_ + b);
                } else {
                    // a(b - stride, b) = sqrt(occ)
                    if (occ > 0)
                        next.row(s * db_ + b - stride[it->mode]) +=
                            std::sqrt(double(occ)) * cur.row(s * db_ + b);
                }
            }
        cur = std::move(next);
    }
    return cur;
}

Matrix DenseOracle::ordered_moment(const std::vector<int>& u, const std::vector<int>& v,
                                   double t, bool keep_zero_amplitude) {
    const auto slots = thermofield_slots(keep_zero_amplitude);
    if (u.size() != slots.size() || v.size() != slots.size())
        throw IndexOutOfRange("ordered_moment: index length must match slot count");

    // weight string: daggered factors first (all slots), then plain factors
    struct Factor {
        Slot slot;
        bool dagger;
    };
    std::vector<Factor> fs;
    for (std::size_t k = 0; k < slots.size(); ++k)
        for (int r = 0; r < v[k]; ++r) fs.push_back({slots[k], true});
    for (std::size_t k = 0; k < slots.size(); ++k)
        for (int r = 0; r < u[k]; ++r) fs.push_back({slots[k], false});

    if (t != cache_t_) {
        time_cache_.clear();
        cache_t_ = t;
    }

    // expand factor by factor into original-space (X) and converted-auxiliary
    // (G) ladder strings: per factor two branches with folded thermal weights
    Matrix result = Matrix::Zero(d_, d_);
    const std::size_t n_mono = std::size_t(1) << fs.size();
    for (std::size_t mask = 0; mask < n_mono; ++mask) {
        Complex coeff{1.0, 0.0};
        double phase_omega = 0.0;
        std::vector<LadderOp> x_ops, g_rev;
        bool dead = false;
        for (std::size_t i = 0; i < fs.size() && !dead; ++i) {
            const auto& f = fs[i];
            const double nb = nbar_[f.slot.mode];
            const double ch = std::sqrt(nb + 1.0), sh = std::sqrt(nb);
            const double w = fock_.modes[f.slot.mode].omega;
            const bool aux = (mask >> i) & 1;
            double c;
            LadderOp op{f.slot.mode, false};
            double dphase = 0.0;
            if (!f.slot.primed) {
                if (!f.dagger) { // b = ch a - sh c^+
                    if (!aux) { c = ch; op.dagger = false; }
                    else { c = -ch; op.dagger = false; dphase = -w; }
                } else { // b^+ = ch a^+ - sh c
                    if (!aux) { c = ch; op.dagger = true; }
                    else { c = (nb > 0 ? -nb / ch : 0.0); op.dagger = true; dphase = +w; }
                }
            } else {
                if (!f.dagger) { // b' = ch c - sh a^+
                    if (!aux) { c = -sh; op.dagger = true; }
                    else { c = sh; op.dagger = true; dphase = +w; }
                } else { // b'^+ = ch c^+ - sh a
                    if (!aux) { c = -sh; op.dagger = false; }
                    else {
                        if (nb <= 0.0) { dead = true; break; }
                        c = (nb + 1.0) / sh; op.dagger = false; dphase = -w;
                    }
                }
            }
            if (c == 0.0) { dead = true; break; }
            coeff *= c;
            if (!aux) x_ops.push_back(op);
            else { g_rev.push_back(op); phase_omega += dphase; }
        }
        if (dead) continue;

        std::vector<LadderOp> g_ops(g_rev.rbegin(), g_rev.rend());
        std::string key;
        for (const auto& op : g_ops)
            key += char('a' + op.mode) + std::string(op.dagger ? "+" : "-");

        auto rotated = rotated_cache_.find(key);
        if (rotated == rotated_cache_.end()) {
            const Matrix init = apply_ladder_left(g_ops, rho0_);
            rotated = rotated_cache_.emplace(key, rotate_initial(init)).first;
        }
        auto evolved = time_cache_.find(key);
        if (evolved == time_cache_.end())
            evolved = time_cache_.emplace(key, reconstruct(rotated->second, t)).first;

        const Matrix weighted = apply_ladder_left(x_ops, evolved->second);
        result += coeff * std::exp(Complex(0.0, phase_omega * t)) * partial_trace(weighted);
    }
    return result;
}

Complex DenseOracle::f_moment(const Matrix& a_s, int f_power, double t) {
    Matrix fp = Matrix::Identity(db_, db_);
    for (int i = 0; i < f_power; ++i) fp = fp * f_;
    const Matrix op = kron(a_s, fp);
    const Matrix rho = full_state(t);
    return (op * rho).trace();
}

// ---------------------------------------------------------------------------

namespace {

void check_dephasing(const SystemSpec& sys) {
    sys.validate();
    const Matrix& q = sys.has_quadratic ? sys.q1 : sys.q;
    for (int i = 0; i < sys.d; ++i)
        for (int j = 0; j < sys.d; ++j)
            if (i != j && (std::abs(sys.h_s(i, j)) > 1e-12 || std::abs(q(i, j)) > 1e-12))
                throw NotDephasing(
                    "analytic_dephasing: H_S and Q must be simultaneously diagonal");
}

Matrix dephasing_from_kernel(const SystemSpec& sys, const Matrix& rho0, double t,
                             Complex kernel_i) {
    const Matrix& q = sys.has_quadratic ? sys.q1 : sys.q;
    Matrix out = rho0;
    for (int a = 0; a < sys.d; ++a)
        for (int b = 0; b < sys.d; ++b) {
            if (a == b) continue;
            const double ha = sys.h_s(a, a).real(), hb = sys.h_s(b, b).real();
            const double qa = q(a, a).real(), qb = q(b, b).real();
            const Complex expo = Complex(0.0, -(ha - hb) * t) -
                                 (qa - qb) * (qa * kernel_i - qb * std::conj(kernel_i));
            out(a, b) = rho0(a, b) * std::exp(expo);
        }
    return out;
}

} // namespace

Matrix analytic_dephasing(const SystemSpec& sys, const SpectralDensityModel& model,
                          const BathThermalState& state, const Matrix& rho0, double t) {
    check_dephasing(sys);
    if (t == 0.0) return rho0;
    auto kern = quad::integrate(
        [&](double tau) -> Complex {
            return (t - tau) * correlation_function(model, state, tau);
        },
        0.0, t, 1e-12, 1e-10);
    return dephasing_from_kernel(sys, rho0, t, kern.value);
}

std::vector<Matrix> analytic_dephasing_series(const SystemSpec& sys,
                                              const SpectralDensityModel& model,
                                              const BathThermalState& state,
                                              const Matrix& rho0,
                                              const std::vector<double>& times) {
    check_dephasing(sys);
    std::vector<Matrix> out;
    out.reserve(times.size());
    // I(t) = t F0(t) - F1(t), accumulated over segments
    Complex f0{0, 0}, f1{0, 0};
    double prev = 0.0;
    for (double t : times) {
        if (t < prev) throw Error("analytic_dephasing_series: times must be sorted");
        if (t > prev) {
            auto s0 = quad::integrate(
                [&](double tau) { return correlation_function(model, state, tau); },
                prev, t, 1e-12, 1e-10);
            auto s1 = quad::integrate(
                [&](double tau) -> Complex {
                    return tau * correlation_function(model, state, tau);
                },
                prev, t, 1e-12, 1e-10);
            f0 += s0.value;
            f1 += s1.value;
            prev = t;
        }
        out.push_back(dephasing_from_kernel(sys, rho0, t, t * f0 - f1));
    }
    return out;
}

} // namespace odo
