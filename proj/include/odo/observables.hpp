#pragma once

#include "odo/decomp.hpp"
#include "odo/state.hpp"
#include "odo/types.hpp"

namespace odo {

struct ReducedDensity {
    Matrix rho;
    double hermiticity_defect = 0.0;
    double trace_defect = 0.0;
};

// Tier-0 block with diagnostics.
ReducedDensity reduced_density(const ODOState& state);

// <F^2>_B = C(0+) = Sum_k eta_k.
Complex f_squared_mean(const BathDecomposition& dec);

// System-bath correlated moments via the generalized Wick contraction:
//   order 1: Tr(A F rho_T)   = Sum_k tr_S(A rho_{0_k^+})
//   order 2: Tr(A F^2 rho_T) = Sum_k eta_k tr_S(A rho_S)
//                              + Sum_{kk'} tr_S(A rho_{0_{kk'}^{++}})
// Single-side states only; tier cap must reach the requested order.
Complex correlated_moment(const ODOState& state, const Matrix& a_s, int order,
                          const BathDecomposition& dec);

} // namespace odo
