#include <doctest.h>

#include <cmath>

#include "odo/bath.hpp"
#include "helpers.hpp"

using namespace odo;

TEST_SUITE_BEGIN("bath");

TEST_CASE("spectral density values and odd symmetry") {
    auto drude = SpectralDensityModel::drude(0.5, 1.0);
    CHECK(spectral_density_value(drude, 0.0) == 0.0);
    CHECK(spectral_density_value(drude, 1.0) == doctest::Approx(0.5).epsilon(1e-14));

    auto ohmic = SpectralDensityModel::ohmic(1.0, 1.0, 2.0);
    CHECK(spectral_density_value(ohmic, -1.0) ==
          doctest::Approx(-spectral_density_value(ohmic, 1.0)).epsilon(1e-14));

    auto brown = SpectralDensityModel::brownian(0.3, 1.2, 0.4);
    for (int i = 0; i < 100; ++i) {
        const double w = test::uniform(-30.0, 30.0);
        for (const auto& m : {drude, ohmic, brown})
            CHECK(spectral_density_value(m, -w) + spectral_density_value(m, w) == 0.0);
    }

    auto disc = SpectralDensityModel::discrete({{0.4, 0.8}});
    CHECK_THROWS_AS(spectral_density_value(disc, 1.0), DiscreteModelHasNoDensity);
}

TEST_CASE("reorganization energy matches quadrature") {
    // oracle: (1/pi) Int_0^inf J/w dw by direct sums over a fine grid
    auto quad_reorg = [](const SpectralDensityModel& m, double wmax, int n) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = wmax * (i + 0.5) / n;
            acc += spectral_density_value(m, w) / w;
        }
        return acc * wmax / n / M_PI;
    };
    auto drude = SpectralDensityModel::drude(0.25, 1.0);
    CHECK(quad_reorg(drude, 4000.0, 2000000) ==
          doctest::Approx(reorganization_energy(drude)).epsilon(2e-3));
    auto ohmic = SpectralDensityModel::ohmic(1.0, 1.0, 2.0);
    CHECK(quad_reorg(ohmic, 100.0, 200000) ==
          doctest::Approx(reorganization_energy(ohmic)).epsilon(1e-6));
    auto brown = SpectralDensityModel::brownian(0.3, 1.2, 0.4);
    CHECK(quad_reorg(brown, 2000.0, 2000000) ==
          doctest::Approx(reorganization_energy(brown)).epsilon(1e-4));
}

TEST_CASE("discrete correlation function closed form") {
    auto disc = SpectralDensityModel::discrete({{1.0, 1.0}});
    SUBCASE("zero temperature single mode") {
        auto st = BathThermalState::zero_temperature();
        for (double t : {0.0, 0.7, 2.5}) {
            const Complex c = correlation_function(disc, st, t);
            const Complex want = 0.5 * std::exp(Complex(0, -t));
            CHECK(std::abs(c - want) < 1e-15);
        }
    }
    SUBCASE("finite temperature C(0) = coth(beta/2)/2") {
        BathThermalState st{1.0};
        const Complex c0 = correlation_function(disc, st, 0.0);
        CHECK(c0.real() == doctest::Approx(0.5 / std::tanh(0.5)).epsilon(1e-14));
        CHECK(c0.imag() == doctest::Approx(0.0));
    }
    SUBCASE("explicit Eq-style sum agrees with the implementation") {
        auto multi = SpectralDensityModel::discrete({{0.4, 0.8}, {0.51, 1.3}});
        BathThermalState st{2.0};
        for (double t : {0.0, 0.3, 1.7, 9.2}) {
            Complex sum{0, 0};
            for (const auto& m : multi.modes()) {
                const double nb = 1.0 / std::expm1(st.beta * m.omega);
                sum += 0.5 * m.c * m.c *
                       ((nb + 1) * std::exp(Complex(0, -m.omega * t)) +
                        nb * std::exp(Complex(0, m.omega * t)));
            }
            CHECK(std::abs(correlation_function(multi, st, t) - sum) < 1e-15);
        }
    }
}

TEST_CASE("continuous correlation function against closed forms") {
    SUBCASE("ohmic exponential at zero temperature") {
        // C(t) = (alpha/2) Gamma(s+1) wc^2 / (1 + i wc t)^{s+1}
        for (double s : {1.0, 2.0}) {
            auto m = SpectralDensityModel::ohmic(0.8, s, 2.0);
            auto st = BathThermalState::zero_temperature();
            for (double t : {0.0, 0.4, 3.1}) {
                const Complex want = 0.4 * std::tgamma(s + 1.0) * 4.0 /
                                     std::pow(Complex(1.0, 2.0 * t), s + 1.0);
                const Complex got = correlation_function(m, st, t);
                CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
            }
        }
    }
    SUBCASE("drude at finite temperature vs converged Matsubara series") {
        const double lam = 0.25, gc = 1.0, beta = 1.0;
        auto m = SpectralDensityModel::drude(lam, gc);
        BathThermalState st{beta};
        for (double t : {0.5, 1.0, 4.0}) {
            Complex series = lam * gc * Complex(1.0 / std::tan(0.5 * beta * gc), -1.0) *
                             std::exp(-gc * t);
            for (int n = 1; n < 400000; ++n) {
                const double nu = 2 * M_PI * n / beta;
                series += (4 * lam * gc / beta) * nu / (nu * nu - gc * gc) *
                          std::exp(-nu * t);
                if (nu * t > 40.0) break;
            }
            const Complex got = correlation_function(m, st, t);
            CHECK(std::abs(got - series) < 1e-8 * std::abs(series));
        }
    }
    SUBCASE("drude C(0) is ultraviolet-divergent") {
        auto m = SpectralDensityModel::drude(0.25, 1.0);
        BathThermalState st{1.0};
        CHECK_THROWS_AS(correlation_function(m, st, 0.0), QuadratureFailure);
    }
    SUBCASE("hermiticity C(-t) = conj C(t)") {
        auto m = SpectralDensityModel::drude(0.25, 1.0);
        BathThermalState st{2.0};
        for (int i = 0; i < 5; ++i) {
            const double t = test::uniform(0.05, 8.0);
            CHECK(std::abs(correlation_function(m, st, -t) -
                           std::conj(correlation_function(m, st, t))) < 1e-9);
        }
    }
    SUBCASE("brownian oscillator C(0) finite and real") {
        auto m = SpectralDensityModel::brownian(0.3, 1.2, 0.4);
        BathThermalState st{1.5};
        const Complex c0 = correlation_function(m, st, 0.0);
        CHECK(c0.real() > 0.0);
        CHECK(std::abs(c0.imag()) < 1e-9 * c0.real());
    }
}

TEST_CASE("discretize_bath") {
    auto drude = SpectralDensityModel::drude(0.25, 1.0);
    auto st = BathThermalState{2.0};

    SUBCASE("single-mode equal-reorganization sum rule") {
        auto one = discretize_bath(drude, st, 1, DiscretizationScheme::equal_reorganization);
        REQUIRE(one.modes().size() == 1);
        const auto& m = one.modes()[0];
        CHECK(m.c * m.c / (2 * m.omega) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("sum rule within 1% for N = 64, exact for equal-reorganization") {
        for (auto scheme : {DiscretizationScheme::equal_reorganization,
                            DiscretizationScheme::gauss_legendre}) {
            auto disc = discretize_bath(drude, st, 64, scheme);
            CHECK(reorganization_energy(disc) ==
                  doctest::Approx(0.25)
                      .epsilon(scheme == DiscretizationScheme::equal_reorganization
                                   ? 1e-12
                                   : 1e-2));
        }
    }
    SUBCASE("N = 64 reproduces the continuous correlation function") {
        auto disc = discretize_bath(drude, st, 64, DiscretizationScheme::equal_reorganization);
        double max_err = 0.0, max_c = 0.0;
        for (int i = 1; i <= 40; ++i) {
            const double t = 10.0 * i / 40;
            const Complex cont = correlation_function(drude, st, t);
            const Complex dsc = correlation_function(disc, st, t);
            max_err = std::max(max_err, std::abs(cont - dsc));
            max_c = std::max(max_c, std::abs(cont));
        }
        CHECK(max_err < 0.02 * max_c);
    }
    SUBCASE("gauss-legendre nodes of a 2-point rule") {
        auto ohmic = SpectralDensityModel::ohmic(1.0, 1.0, 2.0);
        auto two = discretize_bath(ohmic, st, 2, DiscretizationScheme::gauss_legendre);
        REQUIRE(two.modes().size() == 2);
        // GL2 nodes on [0, wmax]: wmax (1 -+ 1/sqrt(3))/2 with wmax = 10 wc
        const double wmax = 20.0;
        CHECK(two.modes()[0].omega ==
              doctest::Approx(0.5 * wmax * (1 - 1 / std::sqrt(3.0))).epsilon(1e-12));
        CHECK(two.modes()[1].omega ==
              doctest::Approx(0.5 * wmax * (1 + 1 / std::sqrt(3.0))).epsilon(1e-12));
    }
}

TEST_SUITE_END();
