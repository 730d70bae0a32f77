#include <doctest.h>

#include <random>

#include "odo/hierarchy.hpp"
#include "helpers.hpp"

using namespace odo;

TEST_SUITE_BEGIN("hierarchy");

TEST_CASE("counts match stars and bars") {
    auto s1 = HierarchySpace::enumerate(1, 2, Side::single);
    CHECK(s1.size() == 3);
    auto s2 = HierarchySpace::enumerate(2, 2, Side::single);
    CHECK(s2.size() == 6);
    auto s3 = HierarchySpace::enumerate(1, 1, Side::double_side);
    CHECK(s3.size() == 3);

    std::mt19937 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 1 + int(gen() % 8);
        const int l = int(gen() % 7);
        auto sp = HierarchySpace::enumerate(k, l, Side::single);
        CHECK(double(sp.size()) == doctest::Approx(HierarchySpace::count(k, l)));
    }
}

TEST_CASE("ordinal zero is the reduced slot and tiers are graded") {
    auto sp = HierarchySpace::enumerate(3, 4, Side::single);
    for (int s = 0; s < sp.slots(); ++s) CHECK(sp.digits(0)[s] == 0);
    int last_tier = 0;
    for (std::uint32_t i = 0; i < sp.size(); ++i) {
        CHECK(sp.tier_of(i) >= last_tier);
        last_tier = sp.tier_of(i);
        int total = 0;
        for (int s = 0; s < sp.slots(); ++s) total += sp.digits(i)[s];
        CHECK(total == sp.tier_of(i));
    }
}

TEST_CASE("neighbor tables round trip") {
    auto sp = HierarchySpace::enumerate(3, 3, Side::double_side);
    for (std::uint32_t i = 0; i < sp.size(); ++i) {
        for (int s = 0; s < sp.slots(); ++s) {
            const auto up = sp.raise_index(i, s);
            if (sp.tier_of(i) == sp.tier_cap()) {
                CHECK(up == kOutside);
            } else {
                REQUIRE(up != kOutside);
                CHECK(sp.lower_index(up, s) == i);
            }
            const auto dn = sp.lower_index(i, s);
            if (sp.digits(i)[s] == 0) {
                CHECK(dn == kOutside);
            } else {
                REQUIRE(dn != kOutside);
                CHECK(sp.raise_index(dn, s) == i);
            }
        }
    }
}

TEST_CASE("explicit raise example") {
    auto sp = HierarchySpace::enumerate(2, 2, Side::single);
    const auto i10 = sp.find({1, 0});
    REQUIRE(i10 != kOutside);
    const auto i11 = sp.raise_index(i10, 1);
    REQUIRE(i11 != kOutside);
    CHECK(sp.digits(i11)[0] == 1);
    CHECK(sp.digits(i11)[1] == 1);

    // raising past the cap leaves the space
    const auto i20 = sp.find({2, 0});
    CHECK(sp.raise_index(i20, 0) == kOutside);
}

TEST_CASE("capacity budget") {
    CHECK_THROWS_AS(HierarchySpace::enumerate(8, 8, Side::double_side, 100),
                    CapacityExceeded);
}

TEST_SUITE_END();
