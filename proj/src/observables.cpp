#include "odo/observables.hpp"

#include "odo/system.hpp"

namespace odo {

ReducedDensity reduced_density(const ODOState& state) {
    ReducedDensity r;
    r.rho = state.block_matrix(0);
    r.hermiticity_defect = hermiticity_defect(r.rho);
    r.trace_defect = std::abs(r.rho.trace() - Complex(1.0, 0.0));
    return r;
}

Complex f_squared_mean(const BathDecomposition& dec) { return dec.sum_eta(); }

Complex correlated_moment(const ODOState& state, const Matrix& a_s, int order,
                          const BathDecomposition& dec) {
    const auto& sp = state.space();
    if (sp.side() != Side::single)
        throw Error("correlated_moment: single-side states only");
    if (order != 1 && order != 2) throw Error("correlated_moment: order must be 1 or 2");
    if (sp.tier_cap() < order)
        throw TierTooShallow("correlated_moment: tier cap " +
                             std::to_string(sp.tier_cap()) + " < order " +
                             std::to_string(order));
    if (sp.terms() != dec.size())
        throw ShapeMismatch("correlated_moment: decomposition does not match the space");

    const int k_terms = sp.terms();
    auto tr_with = [&](std::uint32_t ord) {
        return (a_s * state.block_matrix(ord)).trace() * state.scale(ord);
    };

    if (order == 1) {
        Complex m{0, 0};
        for (int k = 0; k < k_terms; ++k) m += tr_with(sp.raise_index(0, k));
        return m;
    }
    Complex m = dec.sum_eta() * (a_s * state.block_matrix(0)).trace();
    for (int ka = 0; ka < k_terms; ++ka) {
        const std::uint32_t up = sp.raise_index(0, ka);
        for (int kb = 0; kb < k_terms; ++kb) m += tr_with(sp.raise_index(up, kb));
    }
    return m;
}

} // namespace odo
