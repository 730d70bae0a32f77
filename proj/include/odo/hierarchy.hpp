#pragma once

#include <cstdint>
#include <unordered_map>
#include <string>
#include <vector>

#include "odo/errors.hpp"
#include "odo/types.hpp"

namespace odo {

enum class Side { single, double_side };

// Graded enumeration of hierarchy multi-indices up to total tier L, with
// precomputed raise/lower neighbor tables. Single side holds K slots (the
// n-vector of the dissipaton hierarchy); double side holds 2K slots, [0,K)
// for u and [K,2K) for v. Ordinal 0 is the zero index (the reduced density
// operator's slot) and ordinals are grouped tier by tier in lexicographic
// order, so tier-sliced traversal is contiguous.
class HierarchySpace {
public:
    static HierarchySpace enumerate(int terms, int tier_cap, Side side,
                                    std::size_t index_budget = kDefaultIndexBudget);

    // C(slots + tier_cap, tier_cap), as a double to sidestep overflow in guards.
    static double count(int slots, int tier_cap);

    int terms() const { return terms_; }
    int slots() const { return slots_; }
    int tier_cap() const { return tier_cap_; }
    Side side() const { return side_; }
    std::size_t size() const { return size_; }

    int tier_of(std::uint32_t ordinal) const { return tier_[ordinal]; }
    const std::uint8_t* digits(std::uint32_t ordinal) const {
        return digits_.data() + static_cast<std::size_t>(ordinal) * slots_;
    }

    // Ordinal of the slot-raised / slot-lowered neighbor, kOutside beyond the
    // tier cap or below zero occupation.
    std::uint32_t raise_index(std::uint32_t ordinal, int slot) const {
        return raise_[static_cast<std::size_t>(ordinal) * slots_ + slot];
    }
    std::uint32_t lower_index(std::uint32_t ordinal, int slot) const {
        return lower_[static_cast<std::size_t>(ordinal) * slots_ + slot];
    }

    // Ordinal of an explicit index vector (size = slots), kOutside if not enumerated.
    std::uint32_t find(const std::vector<std::uint8_t>& index) const;

    const std::uint32_t* raise_row(std::uint32_t ordinal) const {
        return raise_.data() + static_cast<std::size_t>(ordinal) * slots_;
    }
    const std::uint32_t* lower_row(std::uint32_t ordinal) const {
        return lower_.data() + static_cast<std::size_t>(ordinal) * slots_;
    }

    static constexpr std::size_t kDefaultIndexBudget = std::size_t(1) << 26;

private:
    int terms_ = 0;
    int slots_ = 0;
    int tier_cap_ = 0;
    Side side_ = Side::single;
    std::size_t size_ = 0;
    std::vector<std::uint8_t> digits_;
    std::vector<std::uint8_t> tier_;
    std::vector<std::uint32_t> raise_;
    std::vector<std::uint32_t> lower_;
    std::unordered_map<std::string, std::uint32_t> lookup_;

    std::string key(const std::uint8_t* idx) const {
        return std::string(reinterpret_cast<const char*>(idx), slots_);
    }
};

} // namespace odo
