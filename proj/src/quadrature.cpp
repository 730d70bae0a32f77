#include "quadrature.hpp"

#include <Eigen/Dense>

#include "odo/errors.hpp"

namespace odo::quad {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw Error("gauss_legendre: order must be >= 1");
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = b;
        jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    if (es.info() != Eigen::Success)
        throw EigenSolveFailure("gauss_legendre: Jacobi eigensolve failed");
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        w[i] = 2.0 * v * v;
    }
    return {x, w};
}

} // namespace odo::quad
