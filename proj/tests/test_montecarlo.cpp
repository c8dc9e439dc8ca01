// SPDX-License-Identifier: Apache-2.0

#include "mumimo/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace mumimo;

namespace {

TrialPlan plan_of(std::int64_t trials, std::uint64_t seed, int threads = 1) {
    TrialPlan p;
    p.num_trials = trials;
    p.base_seed = seed;
    p.threads = threads;
    return p;
}

SinrModel model_of(const SystemConfig& c, const LargeScaleFading& f) {
    const auto e = characteristic_coefficients(build_profile(c, f, 0));
    return model_for(c, f, e, 0, 0);
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& g) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = {nd(g), nd(g)};
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace

TEST_CASE("trial plan validation") {
    TrialPlan p;
    CHECK_NOTHROW(p.validate());
    p.num_trials = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TrialPlan{};
    p.batch_size = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = TrialPlan{};
    p.threads = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("channel sampling") {
    const SystemConfig c{2, 2, 2, 1.0};
    LargeScaleFading f(2, 2);
    f.set(0, 0, 0, 1.0);
    f.set(0, 0, 1, 0.5);
    f.set(0, 1, 0, 0.2);
    f.set(0, 1, 1, 0.05);

    SUBCASE("entry power equals the large-scale gain") {
        double sum[2][2] = {{0, 0}, {0, 0}};
        const int draws = 25000;
        for (int t = 0; t < draws; ++t) {
            RngStream rng(5, static_cast<std::uint64_t>(t));
            const auto r = sample_channels(c, f, 0, rng);
            for (int i = 0; i < 2; ++i) {
                for (int k = 0; k < 2; ++k) {
                    sum[i][k] += r.g[static_cast<std::size_t>(i)].col(k).squaredNorm();
                }
            }
        }
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 2; ++k) {
                const double mean = sum[i][k] / (2.0 * draws);
                CHECK(std::fabs(mean / f(0, i, k) - 1.0) < 0.01);
            }
        }
    }

    SUBCASE("home channel has full column rank") {
        const SystemConfig big{3, 4, 6, 1.0};
        const auto fb = LargeScaleFading::symmetric(3, 4, 1.0, 0.3);
        for (int t = 0; t < 1000; ++t) {
            RngStream rng(6, static_cast<std::uint64_t>(t));
            const auto r = sample_channels(big, fb, 1, rng);
            CHECK(r.home_cell == 1);
            const Eigen::MatrixXcd gram = r.g[1].adjoint() * r.g[1];
            CHECK(gram.determinant().real() > 0.0);
        }
    }

    SUBCASE("fixed seed reproduces the realization bit for bit") {
        RngStream a(7, 42);
        RngStream b(7, 42);
        const auto ra = sample_channels(c, f, 0, a);
        const auto rb = sample_channels(c, f, 0, b);
        for (std::size_t i = 0; i < ra.g.size(); ++i) {
            CHECK((ra.g[i].array() == rb.g[i].array()).all());
        }
    }
}

TEST_CASE("zero-forcing SINR") {
    SUBCASE("single user, single cell") {
        const SystemConfig c{1, 1, 5, 3.0};
        const auto f = LargeScaleFading::symmetric(1, 1, 0.7, 0.1);
        RngStream rng(8, 0);
        const auto r = sample_channels(c, f, 0, rng);
        const auto s = zf_sinr(r, 3.0);
        REQUIRE(s.size() == 1);
        CHECK(s[0] == doctest::Approx(3.0 * r.g[0].squaredNorm()).epsilon(1e-12));
    }

    SUBCASE("filter inverts the home channel") {
        const SystemConfig c{2, 3, 7, 1.0};
        RngStream rng(9, 0);
        const auto r = sample_channels(c, LargeScaleFading::symmetric(2, 3, 1.0, 0.2), 0, rng);
        const Eigen::MatrixXcd w = zf_filter(r.g[0]);
        CHECK((w * r.g[0] - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
    }

    SUBCASE("invariant under a common unitary rotation") {
        std::mt19937_64 g(10);
        const SystemConfig c{3, 3, 6, 4.0};
        const auto f = LargeScaleFading::symmetric(3, 3, 1.0, 0.4);
        for (int t = 0; t < 20; ++t) {
            RngStream rng(10, static_cast<std::uint64_t>(t));
            auto r = sample_channels(c, f, 0, rng);
            const auto before = zf_sinr(r, 4.0);
            const Eigen::MatrixXcd q = random_unitary(6, g);
            for (auto& m : r.g) {
                m = q * m;
            }
            const auto after = zf_sinr(r, 4.0);
            for (std::size_t k = 0; k < before.size(); ++k) {
                CHECK(oracle::rel_diff(after[k], before[k]) < 1e-10);
            }
        }
    }

    SUBCASE("ill-conditioned channels") {
        Eigen::MatrixXcd g(4, 2);
        g.setRandom();
        g.col(1) = g.col(0);
        CHECK_THROWS_AS(zf_filter(g), std::runtime_error);
        // Nearly parallel columns still pass through the orthogonal path.
        Eigen::MatrixXcd h(4, 2);
        h.setRandom();
        h.col(1) = h.col(0) + 1e-5 * Eigen::VectorXcd::Ones(4);
        const Eigen::MatrixXcd w = zf_filter(h);
        CHECK((w * h - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-6);
    }

    SUBCASE("mean SINR matches the two-variable model") {
        const SystemConfig c{3, 4, 8, 5.0};
        const auto f = LargeScaleFading::symmetric(3, 4, 1.0, 0.2);
        const auto plan = plan_of(100000, 11);
        const auto zf = zf_sinr_samples(c, f, plan, 0);
        auto p2 = plan;
        p2.base_seed = 12;
        const auto md = model_sinr_samples(model_of(c, f), p2);
        double a = 0.0;
        double b = 0.0;
        for (std::size_t i = 0; i < zf.size(); ++i) {
            a += zf[i];
            b += md[i];
        }
        CHECK(std::fabs(a / b - 1.0) < 0.01);
    }
}

TEST_CASE("rate estimate") {
    SUBCASE("single cell with N = K") {
        const SystemConfig c{1, 3, 3, 2.0};
        const auto f = LargeScaleFading::symmetric(1, 3, 1.5, 0.1);
        const auto e = estimate_rate(c, f, plan_of(20000, 13));
        const double ref = oracle::half_line([](double x) { return std::exp(-x / 1.5) / 1.5 * std::log2(1.0 + 2.0 * x); });
        CHECK(std::fabs(e.mean - ref) < 3.0 * e.standard_error);
        CHECK(e.trials == 20000);
    }

    SUBCASE("low transmit power is linear in p_u") {
        const double pu = 1e-4;
        const SystemConfig c{4, 10, 20, pu};
        const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
        const auto e = estimate_rate(c, f, plan_of(5000, 14));
        const double first_order = pu * 11.0 * std::numbers::log2e;
        CHECK(std::fabs(e.mean / first_order - 1.0) < 0.02);
    }

    SUBCASE("matches the closed form") {
        const SystemConfig c{4, 10, 20, 10.0};
        const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
        const auto e = estimate_rate(c, f, plan_of(4000, 15));
        const double exact = rate_exact(model_of(c, f)).value;
        CHECK(std::fabs(e.mean - exact) < 3.0 * e.standard_error);
        const auto u = estimate_user_rate(c, f, plan_of(4000, 15), 3);
        CHECK(std::fabs(u.mean - exact) < 3.0 * u.standard_error);
    }

    SUBCASE("standard error halves with four times the trials") {
        const SystemConfig c{2, 2, 4, 3.0};
        const auto f = LargeScaleFading::symmetric(2, 2, 1.0, 0.3);
        const auto small = estimate_user_rate(c, f, plan_of(5000, 16), 0);
        const auto large = estimate_user_rate(c, f, plan_of(20000, 17), 0);
        CHECK(large.standard_error / small.standard_error == doctest::Approx(0.5).epsilon(0.1));
    }

    SUBCASE("independent of threads and batch size") {
        const SystemConfig c{3, 4, 8, 5.0};
        const auto f = LargeScaleFading::symmetric(3, 4, 1.0, 0.2);
        auto p1 = plan_of(3000, 18, 1);
        auto p3 = plan_of(3000, 18, 3);
        p3.batch_size = 100;
        const auto a = estimate_rate(c, f, p1);
        const auto b = estimate_rate(c, f, p3);
        CHECK(a.mean == b.mean);
        CHECK(a.standard_error == b.standard_error);
        CHECK(zf_sinr_samples(c, f, p1, 2) == zf_sinr_samples(c, f, p3, 2));
    }
}

TEST_CASE("symbol error rate estimate") {
    const auto qpsk = ModulationScheme::psk(4);
    CHECK(conditional_ser(qpsk, 0.0) == doctest::Approx(0.75).epsilon(1e-14));
    const double big = conditional_ser(qpsk, 100.0);
    CHECK(big < 1e-20);
    const auto bpsk = ModulationScheme::psk(2);
    // BPSK: Q(sqrt(2 gamma)) = erfc(sqrt(gamma)) / 2.
    CHECK(conditional_ser(bpsk, 1.3) == doctest::Approx(0.5 * std::erfc(std::sqrt(1.3))).epsilon(1e-10));

    const SystemConfig c{4, 10, 20, 10.0};
    const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
    const auto semi = estimate_ser(c, f, qpsk, plan_of(10000, 19));
    const double exact = ser_exact(model_of(c, f), qpsk).value;
    CHECK(std::fabs(semi.mean / exact - 1.0) < 0.02);

    const auto sym = estimate_ser(c, f, qpsk, plan_of(10000, 20), SerMode::symbol_level);
    const double se = std::hypot(semi.standard_error, sym.standard_error);
    CHECK(std::fabs(sym.mean - semi.mean) < 3.0 * se);
}

TEST_CASE("outage estimate") {
    const SystemConfig c{4, 10, 20, 10.0};
    const auto f = LargeScaleFading::symmetric(4, 10, 1.0, 0.1);
    const auto model = model_of(c, f);
    const auto plan = plan_of(10000, 21);
    CHECK(estimate_outage(c, f, plan, 1e-9).mean == 0.0);
    double prev = 0.0;
    for (double th : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        const auto e = estimate_outage(c, f, plan, th);
        CHECK(e.mean >= prev);
        prev = e.mean;
        CHECK(std::fabs(e.mean - outage_exact(model, th).value) < 0.01);
    }
    CHECK(estimate_outage(c, f, plan, 0.0).mean == 0.0);
    CHECK_THROWS_AS(estimate_outage(c, f, plan, -1.0), std::domain_error);
}
