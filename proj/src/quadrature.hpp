#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "odo/types.hpp"

namespace odo::quad {

// Gauss-Kronrod 15(7) pair on [-1,1] (QUADPACK abscissae/weights).
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct GkResult {
    Complex value{0.0, 0.0};
    double error = 0.0;
};

template <typename F>
GkResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Complex fc = f(c);
    Complex kron = kWgk[7] * fc;
    Complex gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double x = h * kXgk[i];
        Complex fsum = f(c - x) + f(c + x);
        kron += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

// Adaptive bisection on [a,b]; complex-valued integrand. Returns value and an
// error estimate; does not throw — callers decide what failure means.
template <typename F>
GkResult integrate(const F& f, double a, double b, double abs_tol, double rel_tol,
                   int max_depth = 48, std::size_t max_intervals = 200000) {
    struct Seg {
        double a, b;
        GkResult r;
        int depth;
    };
    std::vector<Seg> stack;
    GkResult total;
    std::vector<Seg> done;
    stack.push_back({a, b, gk15(f, a, b), 0});
    Complex whole = stack.back().r.value;
    std::size_t n = 1;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const double local_tol =
            std::max(abs_tol, rel_tol * std::abs(whole)) * (s.b - s.a) / (b - a);
        if (s.r.error <= std::max(local_tol, 1e-300) || s.depth >= max_depth ||
            n >= max_intervals) {
            total.value += s.r.value;
            total.error += s.r.error;
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        Seg left{s.a, m, gk15(f, s.a, m), s.depth + 1};
        Seg right{m, s.b, gk15(f, m, s.b), s.depth + 1};
        whole += left.r.value + right.r.value - s.r.value;
        n += 2;
        stack.push_back(left);
        stack.push_back(right);
    }
    return total;
}

// Gauss-Legendre nodes/weights on [-1,1] via the Golub-Welsch Jacobi matrix.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

} // namespace odo::quad
