#pragma once

#include "odo/errors.hpp"
#include "odo/types.hpp"

namespace odo {

// System Hamiltonian and coupling operators. The quadratic family
// H_SB = alpha0 Q0 + alpha1 Q1 F + alpha2 Q2 F^2 is optional; plain linear
// coupling uses q alone.
struct SystemSpec {
    int d = 0;
    Matrix h_s;
    Matrix q;

    bool has_quadratic = false;
    Matrix q0, q1, q2;
    double alpha0 = 0.0, alpha1 = 0.0, alpha2 = 0.0;

    static constexpr double kHermTol = 1e-12;

    void validate() const;

    static SystemSpec linear(const Matrix& h_s, const Matrix& q);
    static SystemSpec quadratic(const Matrix& h_s, const Matrix& q0, double alpha0,
                                const Matrix& q1, double alpha1, const Matrix& q2,
                                double alpha2);
};

double hermiticity_defect(const Matrix& a);

} // namespace odo
