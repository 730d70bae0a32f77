#include "odo/hierarchy.hpp"

#include <algorithm>
#include <stdexcept>

namespace odo {

double HierarchySpace::count(int slots, int tier_cap) {
    double c = 1.0;
    for (int i = 1; i <= tier_cap; ++i) c *= double(slots + i) / double(i);
    return c;
}

HierarchySpace HierarchySpace::enumerate(int terms, int tier_cap, Side side,
                                         std::size_t index_budget) {
    if (terms < 1) throw Error("hierarchy: term count must be >= 1");
    if (tier_cap < 0) throw Error("hierarchy: tier cap must be >= 0");
    if (tier_cap > 255) throw Error("hierarchy: tier cap exceeds digit storage");

    HierarchySpace sp;
    sp.terms_ = terms;
    sp.slots_ = (side == Side::single) ? terms : 2 * terms;
    sp.tier_cap_ = tier_cap;
    sp.side_ = side;

    const double total = count(sp.slots_, tier_cap);
    if (total > double(index_budget))
        throw CapacityExceeded("hierarchy: " + std::to_string(total) +
                               " indices exceed budget " + std::to_string(index_budget));
    const std::size_t n = static_cast<std::size_t>(total + 0.5);

    const int S = sp.slots_;
    sp.digits_.reserve(n * S);
    sp.tier_.reserve(n);

    // Tier by tier, lexicographic within a tier: compositions of t into S
    // non-negative parts, generated by an odometer over the first S-1 digits
    // with the last digit as remainder.
    std::vector<std::uint8_t> comp(S, 0);
    for (int t = 0; t <= tier_cap; ++t) {
        std::vector<int> head(S - 1, 0);
        while (true) {
            int used = 0;
            for (int v : head) used += v;
            for (int s = 0; s < S - 1; ++s) comp[s] = static_cast<std::uint8_t>(head[s]);
            comp[S - 1] = static_cast<std::uint8_t>(t - used);
            sp.digits_.insert(sp.digits_.end(), comp.begin(), comp.end());
            sp.tier_.push_back(static_cast<std::uint8_t>(t));

            int pos = S - 2;
            while (pos >= 0) {
                int partial = 0;
                for (int s = 0; s < pos; ++s) partial += head[s];
                if (head[pos] < t - partial) { ++head[pos]; break; }
                head[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
            for (int s = pos + 1; s < S - 1; ++s) head[s] = 0;
        }
    }
    sp.size_ = sp.tier_.size();
    if (sp.size_ != n)
        throw Error("hierarchy: enumeration does not match the binomial count");

    sp.lookup_.reserve(sp.size_ * 2);
    for (std::uint32_t i = 0; i < sp.size_; ++i)
        sp.lookup_.emplace(sp.key(sp.digits(i)), i);

    sp.raise_.assign(sp.size_ * S, kOutside);
    sp.lower_.assign(sp.size_ * S, kOutside);
    std::vector<std::uint8_t> nb(S);
    for (std::uint32_t i = 0; i < sp.size_; ++i) {
        const std::uint8_t* d = sp.digits(i);
        for (int s = 0; s < S; ++s) {
            if (sp.tier_[i] < tier_cap) {
                std::copy(d, d + S, nb.begin());
                ++nb[s];
                auto it = sp.lookup_.find(sp.key(nb.data()));
                sp.raise_[std::size_t(i) * S + s] = (it != sp.lookup_.end()) ? it->second : kOutside;
            }
            if (d[s] > 0) {
                std::copy(d, d + S, nb.begin());
                --nb[s];
                auto it = sp.lookup_.find(sp.key(nb.data()));
                sp.lower_[std::size_t(i) * S + s] = (it != sp.lookup_.end()) ? it->second : kOutside;
            }
        }
    }
    return sp;
}

std::uint32_t HierarchySpace::find(const std::vector<std::uint8_t>& index) const {
    if (static_cast<int>(index.size()) != slots_) return kOutside;
    auto it = lookup_.find(key(index.data()));
    return (it != lookup_.end()) ? it->second : kOutside;
}

} // namespace odo
