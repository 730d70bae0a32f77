#include "odo/dynamics.hpp"

#include <cmath>

#include "parallel.hpp"

namespace odo {

namespace {

inline void mm_acc(Complex* dst, const Complex* a, const Complex* b, int d, Complex w) {
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const Complex aw = w * a[i * d + k];
            if (aw == Complex{0.0, 0.0}) continue;
            const Complex* brow = b + k * d;
            Complex* drow = dst + i * d;
            for (int j = 0; j < d; ++j) drow[j] += aw * brow[j];
        }
}

inline void axpy(Complex* dst, const Complex* src, Complex w, int n) {
    for (int i = 0; i < n; ++i) dst[i] += w * src[i];
}

std::vector<Complex> to_row_major(const Matrix& m) {
    const int d = static_cast<int>(m.rows());
    std::vector<Complex> v(std::size_t(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v[std::size_t(i) * d + j] = m(i, j);
    return v;
}

// Shared ladder kernel: per ordinal,
//   out = diag rho - i[h, rho] - i[q, accRaise] - i(q accL - accR q)
// with accRaise/accL/accR accumulated over slot neighbors with per-slot,
// per-occupancy amplitudes. Covers both double-side forms and the single-side
// linear ladder (which reads the same lowered block on both sides).
struct LadderKernel {
    const HierarchySpace* space = nullptr;
    int d = 0, S = 0, stride = 0;
    std::vector<Complex> h, q;          // d*d row-major
    std::vector<Complex> diag;          // per ordinal
    std::vector<Complex> amp_raise, amp_low_l, amp_low_r; // S*stride tables

    void run(const ODOState& in, ODOState& out, int threads) const {
        const int dd = d * d;
        const std::size_t n = space->size();
        parallel_for(n, threads, [&](std::size_t b, std::size_t e, int) {
            std::vector<Complex> acc_r(dd), acc_l(dd), acc_rt(dd);
            for (std::size_t i = b; i < e; ++i) {
                const std::uint8_t* dig = space->digits(std::uint32_t(i));
                const std::uint32_t* rr = space->raise_row(std::uint32_t(i));
                const std::uint32_t* lr = space->lower_row(std::uint32_t(i));
                std::fill(acc_r.begin(), acc_r.end(), Complex{0, 0});
                std::fill(acc_l.begin(), acc_l.end(), Complex{0, 0});
                std::fill(acc_rt.begin(), acc_rt.end(), Complex{0, 0});
                for (int s = 0; s < S; ++s) {
                    const int occ = dig[s];
                    if (rr[s] != kOutside) {
                        const Complex c = amp_raise[std::size_t(s) * stride + occ];
                        if (c != Complex{0, 0}) axpy(acc_r.data(), in.block(rr[s]), c, dd);
                    }
                    if (occ > 0) {
                        const Complex cl = amp_low_l[std::size_t(s) * stride + occ];
                        const Complex cr = amp_low_r[std::size_t(s) * stride + occ];
                        const Complex* low = in.block(lr[s]);
                        if (cl != Complex{0, 0}) axpy(acc_l.data(), low, cl, dd);
                        if (cr != Complex{0, 0}) axpy(acc_rt.data(), low, cr, dd);
                    }
                }
                const Complex* rho = in.block(std::uint32_t(i));
                Complex* o = out.block(std::uint32_t(i));
                const Complex dg = diag[i];
                for (int k = 0; k < dd; ++k) {
                    o[k] = dg * rho[k];
                    acc_l[k] += acc_r[k];  // left-multiplied by q
                    acc_rt[k] += acc_r[k]; // right-multiplied by q
                }
                mm_acc(o, h.data(), rho, d, Complex{0, -1});
                mm_acc(o, rho, h.data(), d, Complex{0, 1});
                mm_acc(o, q.data(), acc_l.data(), d, Complex{0, -1});
                mm_acc(o, acc_rt.data(), q.data(), d, Complex{0, 1});
            }
        });
    }
};

// s_n = sqrt(prod_s n_s! w_s^{n_s}) with w_s = |eta| of the slot's term.
std::shared_ptr<const std::vector<double>> build_scales(const HierarchySpace& space,
                                                        const std::vector<double>& w) {
    auto scales = std::make_shared<std::vector<double>>(space.size(), 1.0);
    for (std::uint32_t i = 0; i < space.size(); ++i) {
        const std::uint8_t* dig = space.digits(i);
        double s = 1.0;
        for (int k = 0; k < space.slots(); ++k)
            for (int m = 1; m <= dig[k]; ++m) s *= double(m) * w[k];
        (*scales)[i] = std::sqrt(s);
    }
    return scales;
}

bool any_zero(const std::vector<double>& w) {
    for (double x : w)
        if (x == 0.0) return true;
    return false;
}

double frob(const Matrix& m) { return std::sqrt(m.cwiseAbs2().sum()); }

} // namespace

void RhsGenerator::check_state(const ODOState& in, const ODOState& out) const {
    if (&in.space() != space_ || &out.space() != space_ || in.dim() != d_ ||
        out.dim() != d_)
        throw ShapeMismatch("rhs: state does not match the generator's space");
}

ODOState RhsGenerator::make_initial(const Matrix& rho0) const {
    ODOState st = odo::initial_state(*space_, rho0);
    st.scales = scales_;
    return st;
}

// ---------------------------------------------------------------------------
// double-side, continuous coefficients

struct ContinuousDoubleGenerator::Impl {
    LadderKernel kernel;
};

ContinuousDoubleGenerator::ContinuousDoubleGenerator(const HierarchySpace& space,
                                                     const SystemSpec& sys,
                                                     const BathDecomposition& dec,
                                                     Rescale rescale) {
    sys.validate();
    if (space.side() != Side::double_side)
        throw ShapeMismatch("continuous double-side generator needs a double-side space");
    if (space.terms() != dec.size())
        throw ShapeMismatch("hierarchy term count does not match the decomposition");
    space_ = &space;
    d_ = sys.d;
    impl_ = std::make_shared<Impl>();
    auto& k = impl_->kernel;
    k.space = &space;
    k.d = d_;
    k.S = space.slots();
    k.stride = space.tier_cap() + 1;
    k.h = to_row_major(sys.h_s);
    k.q = to_row_major(sys.q);

    const int K = dec.size();
    const bool resc = (rescale == Rescale::on) ||
                      (rescale == Rescale::auto_default &&
                       dec.origin != DecompOrigin::discrete);
    std::vector<double> w(k.S);
    for (int s = 0; s < k.S; ++s) w[s] = std::abs(dec.terms[s % K].eta);
    const bool use_resc = resc && !any_zero(w);
    if (use_resc) scales_ = build_scales(space, w);

    k.amp_raise.assign(std::size_t(k.S) * k.stride, Complex{0, 0});
    k.amp_low_l.assign(std::size_t(k.S) * k.stride, Complex{0, 0});
    k.amp_low_r.assign(std::size_t(k.S) * k.stride, Complex{0, 0});
    for (int s = 0; s < k.S; ++s) {
        const bool u_side = s < K;
        const int term = s % K;
        const Complex se = u_side ? dec.sqrt_eta[term] : std::conj(dec.sqrt_eta[term]);
        const double ae = std::abs(dec.terms[term].eta);
        for (int n = 0; n <= space.tier_cap(); ++n) {
            Complex raise, low;
            if (use_resc) {
                raise = se * std::sqrt(double(n + 1) * ae);
                low = std::sqrt(double(n)) * (ae > 0 ? se / std::sqrt(ae) : Complex{0, 0});
            } else {
                raise = se;
                low = double(n) * se;
            }
            k.amp_raise[std::size_t(s) * k.stride + n] = raise;
            if (u_side)
                k.amp_low_l[std::size_t(s) * k.stride + n] = low;
            else
                k.amp_low_r[std::size_t(s) * k.stride + n] = low;
        }
    }

    k.diag.resize(space.size());
    std::vector<Complex> slot_gamma(k.S);
    for (int s = 0; s < k.S; ++s)
        slot_gamma[s] = (s < K) ? dec.terms[s].gamma : std::conj(dec.terms[s - K].gamma);
    for (std::uint32_t i = 0; i < space.size(); ++i) {
        const std::uint8_t* dig = space.digits(i);
        Complex g{0, 0};
        for (int s = 0; s < k.S; ++s) g += double(dig[s]) * slot_gamma[s];
        k.diag[i] = -g;
    }

    h_norm_ = frob(sys.h_s);
    for (const auto& t : dec.terms) gamma_max_ = std::max(gamma_max_, std::abs(t.gamma));
}

void ContinuousDoubleGenerator::apply(const ODOState& in, ODOState& out) const {
    check_state(in, out);
    impl_->kernel.run(in, out, threads_);
}

// ---------------------------------------------------------------------------
// double-side, discrete-bath coefficients (zeta_k real, gamma_k = i eps_k)

struct DiscreteDoubleGenerator::Impl {
    LadderKernel kernel;
};

DiscreteDoubleGenerator::DiscreteDoubleGenerator(const HierarchySpace& space,
                                                 const SystemSpec& sys,
                                                 const BathDecomposition& dec,
                                                 Rescale rescale) {
    sys.validate();
    if (space.side() != Side::double_side)
        throw ShapeMismatch("discrete double-side generator needs a double-side space");
    if (space.terms() != dec.size())
        throw ShapeMismatch("hierarchy term count does not match the decomposition");
    if (dec.origin != DecompOrigin::discrete)
        throw Error("discrete double-side generator needs a discrete-origin decomposition");
    for (const auto& t : dec.terms)
        if (std::abs(t.eta.imag()) > 1e-14 * std::abs(t.eta) || t.eta.real() < 0.0 ||
            std::abs(t.gamma.real()) > 1e-14 * std::abs(t.gamma))
            throw Error("discrete double-side generator: eta must be real >= 0 and gamma imaginary");

    space_ = &space;
    d_ = sys.d;
    impl_ = std::make_shared<Impl>();
    auto& k = impl_->kernel;
    k.space = &space;
    k.d = d_;
    k.S = space.slots();
    k.stride = space.tier_cap() + 1;
    k.h = to_row_major(sys.h_s);
    k.q = to_row_major(sys.q);

    const int K = dec.size();
    const bool resc = (rescale == Rescale::on); // default off for discrete
    std::vector<double> w(k.S);
    for (int s = 0; s < k.S; ++s) w[s] = dec.terms[s % K].eta.real();
    const bool use_resc = resc && !any_zero(w);
    if (use_resc) scales_ = build_scales(space, w);

    k.amp_raise.assign(std::size_t(k.S) * k.stride, Complex{0, 0});
    k.amp_low_l.assign(std::size_t(k.S) * k.stride, Complex{0, 0});
    k.amp_low_r.assign(std::size_t(k.S) * k.stride, Complex{0, 0});
    for (int s = 0; s < k.S; ++s) {
        const int term = s % K;
        const double zeta = std::sqrt(dec.terms[term].eta.real());
        for (int n = 0; n <= space.tier_cap(); ++n) {
            double raise, low;
            if (use_resc) {
                raise = zeta * std::sqrt(double(n + 1) * w[s]);
                low = std::sqrt(double(n));
            } else {
                raise = zeta;
                low = double(n) * zeta;
            }
            k.amp_raise[std::size_t(s) * k.stride + n] = raise;
            if (s < K)
                k.amp_low_l[std::size_t(s) * k.stride + n] = low;
            else
                k.amp_low_r[std::size_t(s) * k.stride + n] = low;
        }
    }

    k.diag.resize(space.size());
    std::vector<Complex> slot_gamma(k.S);
    for (int s = 0; s < k.S; ++s)
        slot_gamma[s] = (s < K) ? dec.terms[s].gamma : std::conj(dec.terms[s - K].gamma);
    for (std::uint32_t i = 0; i < space.size(); ++i) {
        const std::uint8_t* dig = space.digits(i);
        Complex g{0, 0};
        for (int s = 0; s < k.S; ++s) g += double(dig[s]) * slot_gamma[s];
        k.diag[i] = -g;
    }

    h_norm_ = frob(sys.h_s);
    for (const auto& t : dec.terms) gamma_max_ = std::max(gamma_max_, std::abs(t.gamma));
}

void DiscreteDoubleGenerator::apply(const ODOState& in, ODOState& out) const {
    check_state(in, out);
    impl_->kernel.run(in, out, threads_);
}

// ---------------------------------------------------------------------------
// single-side dissipaton ladder

struct SingleSideGenerator::Impl {
    LadderKernel kernel;
};

SingleSideGenerator::SingleSideGenerator(const HierarchySpace& space,
                                         const SystemSpec& sys,
                                         const BathDecomposition& dec, Rescale rescale) {
    sys.validate();
    if (space.side() != Side::single)
        throw ShapeMismatch("single-side generator needs a single-side space");
    if (space.terms() != dec.size())
        throw ShapeMismatch("hierarchy term count does not match the decomposition");
    if (!dec.pairing_total())
        throw PairingRequired("single-side generator needs a total pairing map");

    space_ = &space;
    d_ = sys.d;
    impl_ = std::make_shared<Impl>();
    auto& k = impl_->kernel;
    k.space = &space;
    k.d = d_;
    k.S = space.slots();
    k.stride = space.tier_cap() + 1;
    k.h = to_row_major(sys.h_s);
    k.q = to_row_major(sys.q);

    const int K = dec.size();
    const bool resc = (rescale == Rescale::on) ||
                      (rescale == Rescale::auto_default &&
                       dec.origin != DecompOrigin::discrete);
    std::vector<double> w(K);
    for (int s = 0; s < K; ++s) w[s] = std::abs(dec.terms[s].eta);
    const bool use_resc = resc && !any_zero(w);
    if (use_resc) scales_ = build_scales(space, w);

    k.amp_raise.assign(std::size_t(K) * k.stride, Complex{0, 0});
    k.amp_low_l.assign(std::size_t(K) * k.stride, Complex{0, 0});
    k.amp_low_r.assign(std::size_t(K) * k.stride, Complex{0, 0});
    for (int s = 0; s < K; ++s) {
        const Complex eta = dec.terms[s].eta;
        const Complex eta_bar_c = std::conj(dec.terms[dec.kbar[s]].eta);
        for (int n = 0; n <= space.tier_cap(); ++n) {
            Complex raise, low_l, low_r;
            if (use_resc) {
                raise = std::sqrt(double(n + 1) * w[s]);
                const double rs = std::sqrt(double(n) / w[s]);
                low_l = rs * eta;
                low_r = rs * eta_bar_c;
            } else {
                raise = 1.0;
                low_l = double(n) * eta;
                low_r = double(n) * eta_bar_c;
            }
            k.amp_raise[std::size_t(s) * k.stride + n] = raise;
            k.amp_low_l[std::size_t(s) * k.stride + n] = low_l;
            k.amp_low_r[std::size_t(s) * k.stride + n] = low_r;
        }
    }

    k.diag.resize(space.size());
    for (std::uint32_t i = 0; i < space.size(); ++i) {
        const std::uint8_t* dig = space.digits(i);
        Complex g{0, 0};
        for (int s = 0; s < K; ++s) g += double(dig[s]) * dec.terms[s].gamma;
        k.diag[i] = -g;
    }

    h_norm_ = frob(sys.h_s);
    for (const auto& t : dec.terms) gamma_max_ = std::max(gamma_max_, std::abs(t.gamma));
}

void SingleSideGenerator::apply(const ODOState& in, ODOState& out) const {
    check_state(in, out);
    impl_->kernel.run(in, out, threads_);
}

// ---------------------------------------------------------------------------
// quadratic coupling

struct QuadraticGenerator::Impl {
    LadderKernel kernel; // h = H_eff, q = Q1 with alpha1 folded into the tables
    std::vector<Complex> q2;
    std::vector<Complex> eta;
    std::vector<Complex> eta_bar_conj;
    std::vector<double> abs_eta;
    double alpha2 = 0.0;
    bool use_resc = false;
    int K = 0;
};

QuadraticGenerator::QuadraticGenerator(const HierarchySpace& space, const SystemSpec& sys,
                                       const BathDecomposition& dec, Complex f2_mean,
                                       Rescale rescale) {
    sys.validate();
    if (!sys.has_quadratic)
        throw Error("quadratic generator needs a quadratic-family system spec");
    if (space.side() != Side::single)
        throw ShapeMismatch("quadratic generator needs a single-side space");
    if (space.terms() != dec.size())
        throw ShapeMismatch("hierarchy term count does not match the decomposition");
    if (!dec.pairing_total())
        throw PairingRequired("quadratic generator needs a total pairing map");

    space_ = &space;
    d_ = sys.d;
    impl_ = std::make_shared<Impl>();
    auto& im = *impl_;
    auto& k = im.kernel;
    k.space = &space;
    k.d = d_;
    k.S = space.slots();
    k.stride = space.tier_cap() + 1;

    Matrix h_eff = sys.h_s + sys.alpha0 * sys.q0 + sys.alpha2 * f2_mean * sys.q2;
    k.h = to_row_major(h_eff);
    k.q = to_row_major(sys.q1);
    im.q2 = to_row_major(sys.q2);
    im.alpha2 = sys.alpha2;

    const int K = dec.size();
    im.K = K;
    const bool resc = (rescale == Rescale::on) ||
                      (rescale == Rescale::auto_default &&
                       dec.origin != DecompOrigin::discrete);
    std::vector<double> w(K);
    for (int s = 0; s < K; ++s) w[s] = std::abs(dec.terms[s].eta);
    im.use_resc = resc && !any_zero(w);
    if (im.use_resc) scales_ = build_scales(space, w);

    im.eta.resize(K);
    im.eta_bar_conj.resize(K);
    im.abs_eta = w;
    for (int s = 0; s < K; ++s) {
        im.eta[s] = dec.terms[s].eta;
        im.eta_bar_conj[s] = std::conj(dec.terms[dec.kbar[s]].eta);
    }

    // linear ladder, identical to the single-side generator scaled by alpha1
    k.amp_raise.assign(std::size_t(K) * k.stride, Complex{0, 0});
    k.amp_low_l.assign(std::size_t(K) * k.stride, Complex{0, 0});
    k.amp_low_r.assign(std::size_t(K) * k.stride, Complex{0, 0});
    for (int s = 0; s < K; ++s) {
        for (int n = 0; n <= space.tier_cap(); ++n) {
            Complex raise, low_l, low_r;
            if (im.use_resc) {
                raise = std::sqrt(double(n + 1) * w[s]);
                const double rs = std::sqrt(double(n) / w[s]);
                low_l = rs * im.eta[s];
                low_r = rs * im.eta_bar_conj[s];
            } else {
                raise = 1.0;
                low_l = double(n) * im.eta[s];
                low_r = double(n) * im.eta_bar_conj[s];
            }
            k.amp_raise[std::size_t(s) * k.stride + n] = sys.alpha1 * raise;
            k.amp_low_l[std::size_t(s) * k.stride + n] = sys.alpha1 * low_l;
            k.amp_low_r[std::size_t(s) * k.stride + n] = sys.alpha1 * low_r;
        }
    }

    k.diag.resize(space.size());
    for (std::uint32_t i = 0; i < space.size(); ++i) {
        const std::uint8_t* dig = space.digits(i);
        Complex g{0, 0};
        for (int s = 0; s < K; ++s) g += double(dig[s]) * dec.terms[s].gamma;
        k.diag[i] = -g;
    }

    h_norm_ = frob(h_eff);
    for (const auto& t : dec.terms) gamma_max_ = std::max(gamma_max_, std::abs(t.gamma));
}

void QuadraticGenerator::apply(const ODOState& in, ODOState& out) const {
    check_state(in, out);
    const auto& im = *impl_;
    im.kernel.run(in, out, threads_);
    if (im.alpha2 == 0.0) return;

    // double raise / lower terms with Q2
    const auto& sp = *space_;
    const int d = d_, dd = d * d, K = im.K;
    parallel_for(sp.size(), threads_, [&](std::size_t b, std::size_t e, int) {
        std::vector<Complex> acc2(dd), acc2_l(dd), acc2_r(dd);
        for (std::size_t i = b; i < e; ++i) {
            const std::uint8_t* dig = sp.digits(std::uint32_t(i));
            std::fill(acc2.begin(), acc2.end(), Complex{0, 0});
            std::fill(acc2_l.begin(), acc2_l.end(), Complex{0, 0});
            std::fill(acc2_r.begin(), acc2_r.end(), Complex{0, 0});
            bool any = false;
            for (int ka = 0; ka < K; ++ka) {
                for (int kb = ka; kb < K; ++kb) {
                    const double mult = (ka == kb) ? 1.0 : 2.0;
                    // raise at (ka, kb)
                    std::uint32_t up = sp.raise_index(std::uint32_t(i), ka);
                    if (up != kOutside) {
                        std::uint32_t up2 = sp.raise_index(up, kb);
                        if (up2 != kOutside) {
                            double amp = mult;
                            if (im.use_resc) {
                                const double na = dig[ka], nb = dig[kb] + (ka == kb ? 1 : 0);
                                amp *= std::sqrt((na + 1) * im.abs_eta[ka] *
                                                 (nb + 1) * im.abs_eta[kb]);
                            }
                            axpy(acc2.data(), in.block(up2), amp, dd);
                            any = true;
                        }
                    }
                    // lower at (ka, kb)
                    const int na = dig[ka];
                    const int nb = dig[kb];
                    const double fac =
                        (ka == kb) ? double(na) * (na - 1) : double(na) * nb;
                    if (fac <= 0.0) continue;
                    std::uint32_t dn = sp.lower_index(std::uint32_t(i), ka);
                    if (dn == kOutside) continue;
                    std::uint32_t dn2 = sp.lower_index(dn, kb);
                    if (dn2 == kOutside) continue;
                    Complex wl = im.eta[ka] * im.eta[kb];
                    Complex wr = im.eta_bar_conj[ka] * im.eta_bar_conj[kb];
                    double amp = mult * fac;
                    if (im.use_resc)
                        amp /= std::sqrt(fac * im.abs_eta[ka] * im.abs_eta[kb]);
                    axpy(acc2_l.data(), in.block(dn2), amp * wl, dd);
                    axpy(acc2_r.data(), in.block(dn2), amp * wr, dd);
                    any = true;
                }
            }
            if (!any) continue;
            Complex* o = out.block(std::uint32_t(i));
            for (int k = 0; k < dd; ++k) {
                acc2_l[k] += acc2[k];
                acc2_r[k] += acc2[k];
            }
            const Complex mia{0, -im.alpha2}, pia{0, im.alpha2};
            mm_acc(o, im.q2.data(), acc2_l.data(), d, mia);
            mm_acc(o, acc2_r.data(), im.q2.data(), d, pia);
        }
    });
}

// ---------------------------------------------------------------------------

DenseCommutatorGenerator::DenseCommutatorGenerator(const HierarchySpace& space,
                                                   const Matrix& h)
    : h_(h) {
    if (space.size() != 1)
        throw ShapeMismatch("dense commutator generator needs a single-block space");
    space_ = &space;
    d_ = static_cast<int>(h.rows());
    h_norm_ = frob(h);
}

void DenseCommutatorGenerator::apply(const ODOState& in, ODOState& out) const {
    check_state(in, out);
    auto x = in.block_matrix(0);
    auto o = out.block_matrix(0);
    o.noalias() = Complex{0, -1} * (h_ * x - x * h_);
}

} // namespace odo
