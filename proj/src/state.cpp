#include "odo/state.hpp"

#include <cstring>

#include "odo/system.hpp"

namespace odo {

ODOState::ODOState(const HierarchySpace& space, int d, std::size_t entry_budget)
    : space_(&space), d_(d) {
    if (d < 1) throw Error("state: dimension must be >= 1");
    const std::size_t n = space.size() * std::size_t(d) * std::size_t(d);
    if (n > entry_budget)
        throw CapacityExceeded("state: " + std::to_string(n) +
                               " entries exceed budget " + std::to_string(entry_budget));
    data_.assign(n, Complex{0.0, 0.0});
}

void ODOState::set_zero() {
    std::memset(data_.data(), 0, data_.size() * sizeof(Complex));
}

Matrix ODOState::physical_block(std::uint32_t ordinal) const {
    Matrix m = block_matrix(ordinal);
    return m * scale(ordinal);
}

ODOState initial_state(const HierarchySpace& space, const Matrix& rho0,
                       std::size_t entry_budget) {
    const int d = static_cast<int>(rho0.rows());
    if (rho0.cols() != d) throw InvalidDensityMatrix("initial_state: not square");
    if (hermiticity_defect(rho0) > 1e-12)
        throw InvalidDensityMatrix("initial_state: not Hermitian");
    if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > 1e-10)
        throw InvalidDensityMatrix("initial_state: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho0);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw InvalidDensityMatrix("initial_state: not positive semidefinite");

    ODOState st(space, d, entry_budget);
    st.block_matrix(0) = rho0;
    return st;
}

} // namespace odo
