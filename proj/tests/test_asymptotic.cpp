// SPDX-License-Identifier: Apache-2.0

#include "mumimo/asymptotic.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"

using namespace mumimo;

namespace {

// Left side of the degrees-of-freedom condition, written out directly.
double dof_lhs(double beta, double energy, double cross_sum, double kappa) {
    return std::log2(1.0 + beta * energy * (1.0 - 1.0 / kappa) / (energy / kappa * cross_sum + 1.0));
}

}  // namespace

TEST_CASE("regime validation") {
    CHECK_NOTHROW(AsymptoticRegime::fixed_ratio(2.0).validate());
    CHECK_THROWS_AS(AsymptoticRegime::fixed_ratio(1.0).validate(), std::domain_error);
    CHECK_THROWS_AS(AsymptoticRegime::power_scaled(0.0).validate(), std::domain_error);
    CHECK_THROWS_AS(AsymptoticRegime::power_scaled_fixed_ratio(10.0, 0.5).validate(), std::domain_error);
    CHECK_NOTHROW(AsymptoticRegime::fixed_K_growing_N().validate());
}

TEST_CASE("deterministic SIR") {
    const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
    CHECK(mean_cross_gain(f, 0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(deterministic_sir(f, 0, 0, 10.0) == doctest::Approx(30.0).epsilon(1e-14));
    for (double a : {0.05, 0.3, 0.9}) {
        const auto g = LargeScaleFading::symmetric(3, 5, 1.0, a);
        for (double kappa : {1.5, 4.0, 20.0}) {
            CHECK(deterministic_sir(g, 0, 2, kappa) == doctest::Approx((kappa - 1.0) / (2.0 * a)).epsilon(1e-14));
        }
    }
    double prev = 0.0;
    for (double kappa = 1.1; kappa < 1e4; kappa *= 1.7) {
        const double v = deterministic_sir(f, 0, 0, kappa);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev > 1e3);
    CHECK(std::isinf(deterministic_sir(LargeScaleFading::symmetric(1, 3, 1.0, 0.1), 0, 0, 5.0)));
    CHECK_THROWS_AS(deterministic_sir(f, 0, 0, 1.0), std::domain_error);

    SUBCASE("uses the per-cell mean of the cross gains") {
        LargeScaleFading h(2, 2);
        h.set(0, 0, 0, 2.0);
        h.set(0, 1, 0, 0.1);
        h.set(0, 1, 1, 0.3);
        CHECK(deterministic_sir(h, 0, 0, 3.0) == doctest::Approx(2.0 * 2.0 / 0.2).epsilon(1e-14));
    }
}

TEST_CASE("power scaling limits") {
    const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
    CHECK(power_scaled_limit_rate(f, 0, 0, 10.0) == doctest::Approx(std::log2(11.0)).epsilon(1e-15));
    CHECK(power_scaled_limit_rate(f, 0, 0, 1e-12) < 1e-11);
    CHECK_THROWS_AS(power_scaled_limit_rate(f, 0, 0, 0.0), std::domain_error);
    CHECK(power_scaled_fixed_ratio_sinr(f, 0, 0, 10.0, 5.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(power_scaled_fixed_ratio_sinr(f, 0, 0, 10.0, 1e9) == doctest::Approx(10.0).epsilon(1e-7));
    CHECK(limiting_sinr(f, 0, 0, AsymptoticRegime::power_scaled(10.0)) == doctest::Approx(10.0));
    CHECK(limiting_sinr(f, 0, 0, AsymptoticRegime::fixed_ratio(10.0)) == doctest::Approx(30.0));
    CHECK(std::isinf(limiting_sinr(f, 0, 0, AsymptoticRegime::fixed_K_growing_N())));
    CHECK(limiting_sinr(f, 0, 0, AsymptoticRegime::power_scaled_fixed_ratio(10.0, 5.0)) == doctest::Approx(5.0));
}

TEST_CASE("degrees-of-freedom solver") {
    SUBCASE("solution satisfies the condition with equality") {
        for (double a : {0.1, 0.5}) {
            const auto f = LargeScaleFading::symmetric(4, 10, 1.0, a);
            for (double eta : {0.5, 0.8, 0.9, 0.99}) {
                for (double rate = 1.0; rate <= 6.0; rate += 0.5) {
                    const double kappa = required_kappa_for_rate(f, 0, 0, rate, eta);
                    const double energy = std::exp2(rate) - 1.0;
                    CHECK(kappa > 1.0);
                    const double lhs = dof_lhs(1.0, energy, 3.0 * a, kappa);
                    CHECK(lhs >= eta * rate * (1.0 - 1e-12));
                    CHECK(std::fabs(lhs - eta * rate) / (eta * rate) < 1e-5);
                }
            }
        }
    }

    SUBCASE("monotone in the ultimate rate and the cross gain") {
        for (double eta : {0.8, 0.9}) {
            double prev_low = 1.0;
            for (double rate = 1.0; rate <= 6.0; rate += 0.25) {
                const double low = required_kappa_for_rate(LargeScaleFading::symmetric(4, 10, 1.0, 0.1), 0, 0, rate, eta);
                const double high = required_kappa_for_rate(LargeScaleFading::symmetric(4, 10, 1.0, 0.5), 0, 0, rate, eta);
                CHECK(low >= prev_low);
                CHECK(high >= low);
                prev_low = low;
            }
        }
    }

    SUBCASE("bisection agrees with a brute-force scan") {
        const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
        const double kappa = required_kappa_for_rate(f, 0, 0, 3.0, 0.8);
        const double energy = 7.0;
        double scan = 0.0;
        for (double k = 1.0; k < 100.0; k += 1e-4) {
            if (dof_lhs(1.0, energy, 0.3, k) >= 0.8 * 3.0) {
                scan = k;
                break;
            }
        }
        CHECK(std::fabs(kappa - scan) <= 1e-4);
        CHECK(kappa == doctest::Approx(5.872).epsilon(1e-3));
    }

    SUBCASE("small eta approaches one") {
        const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
        const double kappa = required_kappa(f, 0, 0, 10.0, 1e-6);
        CHECK(kappa > 1.0);
        CHECK(kappa < 1.001);
    }

    SUBCASE("input checks and antenna sizing") {
        const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
        CHECK_THROWS_AS(required_kappa(f, 0, 0, 10.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(required_kappa(f, 0, 0, 10.0, 0.0), std::domain_error);
        CHECK(antennas_for_kappa(5.872, 10) == 59);
        CHECK(antennas_for_kappa(6.0, 10) == 60);
        CHECK(antennas_for_kappa(1.5, 7) == 11);
    }
}
