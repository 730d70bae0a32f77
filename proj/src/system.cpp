#include "odo/system.hpp"

namespace odo {

double hermiticity_defect(const Matrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void SystemSpec::validate() const {
    if (d < 1) throw Error("system: dimension must be >= 1");
    auto check = [&](const Matrix& m, const char* name) {
        if (m.rows() != d || m.cols() != d)
            throw ShapeMismatch(std::string("system: ") + name + " is not d x d");
        if (hermiticity_defect(m) > kHermTol)
            throw Error(std::string("system: ") + name + " is not Hermitian");
    };
    check(h_s, "h_s");
    if (has_quadratic) {
        check(q0, "q0");
        check(q1, "q1");
        check(q2, "q2");
    } else {
        check(q, "q");
    }
}

SystemSpec SystemSpec::linear(const Matrix& h_s, const Matrix& q) {
    SystemSpec s;
    s.d = static_cast<int>(h_s.rows());
    s.h_s = h_s;
    s.q = q;
    s.validate();
    return s;
}

SystemSpec SystemSpec::quadratic(const Matrix& h_s, const Matrix& q0, double alpha0,
                                 const Matrix& q1, double alpha1, const Matrix& q2,
                                 double alpha2) {
    SystemSpec s;
    s.d = static_cast<int>(h_s.rows());
    s.h_s = h_s;
    s.has_quadratic = true;
    s.q0 = q0;
    s.q1 = q1;
    s.q2 = q2;
    s.alpha0 = alpha0;
    s.alpha1 = alpha1;
    s.alpha2 = alpha2;
    s.q = q1; // linear part doubles as the plain coupling
    s.validate();
    return s;
}

} // namespace odo
