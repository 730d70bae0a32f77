#pragma once

#include <memory>
#include <vector>

#include "odo/errors.hpp"
#include "odo/hierarchy.hpp"
#include "odo/types.hpp"

namespace odo {

// Flat array of d x d complex blocks, one per hierarchy ordinal; the dynamic
// variable of every EOM. Blocks are row-major. When a generator rescales the
// ADOs for conditioning, `scales` carries s_n per ordinal (null = unscaled);
// physical block = stored block * scale.
class ODOState {
public:
    ODOState() = default;
    ODOState(const HierarchySpace& space, int d,
             std::size_t entry_budget = kDefaultEntryBudget);

    const HierarchySpace& space() const { return *space_; }
    int dim() const { return d_; }
    std::size_t block_count() const { return space_->size(); }
    std::size_t entries() const { return data_.size(); }

    Complex* block(std::uint32_t ordinal) {
        return data_.data() + std::size_t(ordinal) * d_ * d_;
    }
    const Complex* block(std::uint32_t ordinal) const {
        return data_.data() + std::size_t(ordinal) * d_ * d_;
    }
    Eigen::Map<Matrix> block_matrix(std::uint32_t ordinal) {
        return {block(ordinal), d_, d_};
    }
    Eigen::Map<const Matrix> block_matrix(std::uint32_t ordinal) const {
        return {block(ordinal), d_, d_};
    }
    // physical (unscaled) copy of a block
    Matrix physical_block(std::uint32_t ordinal) const;
    double scale(std::uint32_t ordinal) const {
        return scales ? (*scales)[ordinal] : 1.0;
    }

    Complex* data() { return data_.data(); }
    const Complex* data() const { return data_.data(); }
    void set_zero();

    std::shared_ptr<const std::vector<double>> scales;

    static constexpr std::size_t kDefaultEntryBudget = std::size_t(1) << 27;

private:
    const HierarchySpace* space_ = nullptr;
    int d_ = 0;
    std::vector<Complex> data_;
};

// Tier-0 slot = rho_S(0), all other slots exactly zero. Checks Hermitian,
// unit trace, positive semidefinite.
ODOState initial_state(const HierarchySpace& space, const Matrix& rho0,
                       std::size_t entry_budget = ODOState::kDefaultEntryBudget);

} // namespace odo
