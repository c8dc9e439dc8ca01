// SPDX-License-Identifier: Apache-2.0

#include "mumimo/cellnet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mumimo/closedform.hpp"

namespace mumimo {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// Cluster generator (i, j) with r = i^2 + ij + j^2.
struct Cluster {
    int i;
    int j;
};

Cluster cluster_for(int reuse) {
    switch (reuse) {
        case 1:
            return {1, 0};
        case 3:
            return {1, 1};
        case 7:
            return {2, 1};
        default:
            throw std::invalid_argument("reuse factor must be 1, 3 or 7");
    }
}

// Lattice point p a1 + q a2 belongs to the home cell's group when it is an
// integer combination of (i, j) and its 60-degree rotation (-j, i + j).
bool co_channel(int p, int q, Cluster c) {
    const int r = c.i * c.i + c.i * c.j + c.j * c.j;
    const int m = p * (c.i + c.j) + q * c.j;
    const int n = q * c.i - p * c.j;
    return m % r == 0 && n % r == 0;
}

double shadowing(const NetworkScenario& s, RngStream& rng) {
    return std::pow(10.0, s.shadow_sigma_db * rng.normal() / 10.0);
}

Point uniform_in_cell(const NetworkScenario& s, Point center, RngStream& rng) {
    const double half_width = s.cell_radius * kSqrt3 / 2.0;
    for (;;) {
        const Point p{center.x + (2.0 * rng.uniform() - 1.0) * half_width,
                      center.y + (2.0 * rng.uniform() - 1.0) * s.cell_radius};
        if (inside_hexagon(p, center, s.cell_radius) && distance(p, center) >= s.exclusion_radius) {
            return p;
        }
    }
}

}  // namespace

void NetworkScenario::validate() const {
    std::string problems;
    if (!(exclusion_radius > 0.0 && exclusion_radius < cell_radius && cell_radius < interference_horizon)) {
        problems += " need 0 < r_h < cell_radius < horizon;";
    }
    if (!(path_loss_exponent > 2.0)) {
        problems += " path-loss exponent must exceed 2;";
    }
    if (!(shadow_sigma_db >= 0.0)) {
        problems += " shadowing sigma must be non-negative;";
    }
    if (reuse_factor != 1 && reuse_factor != 3 && reuse_factor != 7) {
        problems += " reuse factor must be 1, 3 or 7;";
    }
    if (users_per_cell < 1 || antennas < users_per_cell) {
        problems += " need 1 <= K <= N;";
    }
    if (!(transmit_snr > 0.0)) {
        problems += " transmit SNR must be positive;";
    }
    if (!problems.empty()) {
        throw std::invalid_argument("NetworkScenario:" + problems);
    }
}

void OfdmParams::validate() const {
    if (!(useful_duration > 0.0 && useful_duration <= symbol_duration) || !(bandwidth > 0.0)) {
        throw std::invalid_argument("OfdmParams: need 0 < T_u <= T_s and B > 0");
    }
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool inside_hexagon(Point p, Point c, double radius) {
    const double dx = std::fabs(p.x - c.x);
    const double dy = std::fabs(p.y - c.y);
    return dx <= radius * kSqrt3 / 2.0 && dy + dx / kSqrt3 <= radius;
}

std::vector<Point> build_hex_grid(const NetworkScenario& scenario) {
    scenario.validate();
    const Cluster c = cluster_for(scenario.reuse_factor);
    const double spacing = kSqrt3 * scenario.cell_radius;
    const int reach = static_cast<int>(std::ceil(2.0 * scenario.interference_horizon / spacing)) + 1;
    std::vector<Point> grid{{0.0, 0.0}};
    for (int p = -reach; p <= reach; ++p) {
        for (int q = -reach; q <= reach; ++q) {
            if ((p == 0 && q == 0) || !co_channel(p, q, c)) {
                continue;
            }
            const Point bs{spacing * (p + 0.5 * q), spacing * (kSqrt3 / 2.0) * q};
            if (distance(bs, {0.0, 0.0}) <= scenario.interference_horizon) {
                grid.push_back(bs);
            }
        }
    }
    std::stable_sort(grid.begin() + 1, grid.end(), [](Point a, Point b) {
        return std::hypot(a.x, a.y) < std::hypot(b.x, b.y);
    });
    return grid;
}

UserDrop drop_users(const NetworkScenario& scenario, const std::vector<Point>& grid, RngStream& rng) {
    scenario.validate();
    if (grid.empty()) {
        throw std::invalid_argument("drop_users: empty grid");
    }
    const int l = static_cast<int>(grid.size());
    const int k = scenario.users_per_cell;
    UserDrop drop{grid, {}, LargeScaleFading(l, k, 1.0)};
    drop.users.resize(grid.size());
    for (int i = 0; i < l; ++i) {
        auto& cell_users = drop.users[static_cast<std::size_t>(i)];
        cell_users.reserve(static_cast<std::size_t>(k));
        for (int u = 0; u < k; ++u) {
            const Point p = uniform_in_cell(scenario, grid[static_cast<std::size_t>(i)], rng);
            cell_users.push_back(p);
            const double d = distance(p, grid.front());
            const double beta = shadowing(scenario, rng) /
                                std::pow(d / scenario.exclusion_radius, scenario.path_loss_exponent);
            drop.fading.set(0, i, u, beta);
        }
    }
    return drop;
}

double net_rate(const NetworkScenario& scenario, const OfdmParams& ofdm, const UserDrop& drop, int user,
                RngStream& rng) {
    if (user < 0 || user >= scenario.users_per_cell) {
        throw std::out_of_range("net_rate: user index out of range");
    }
    const int shape = scenario.antennas - scenario.users_per_cell + 1;
    double x = 0.0;
    for (int j = 0; j < shape; ++j) {
        x += rng.exponential();
    }
    x *= drop.fading(0, 0, user);
    double z = 0.0;
    for (int i = 1; i < drop.fading.num_cells(); ++i) {
        for (int u = 0; u < drop.fading.users_per_cell(); ++u) {
            z += drop.fading(0, i, u) * rng.exponential();
        }
    }
    const double r = scenario.reuse_factor;
    const double pu = scenario.transmit_snr;
    return ofdm.bandwidth / r * ofdm.overhead() * std::log2(1.0 + pu * x / (pu * z + 1.0 / r));
}

double net_rate_mean(const NetworkScenario& scenario, const OfdmParams& ofdm, const UserDrop& drop, int user) {
    if (user < 0 || user >= scenario.users_per_cell) {
        throw std::out_of_range("net_rate_mean: user index out of range");
    }
    std::vector<double> gains;
    for (int i = 1; i < drop.fading.num_cells(); ++i) {
        for (int u = 0; u < drop.fading.users_per_cell(); ++u) {
            gains.push_back(drop.fading(0, i, u));
        }
    }
    // Noise 1/r is absorbed by scaling p_u by r.
    SinrModel model;
    model.desired.shape = scenario.antennas - scenario.users_per_cell + 1;
    model.desired.scale = drop.fading(0, 0, user);
    model.p_u = scenario.transmit_snr * scenario.reuse_factor;
    if (!gains.empty()) {
        model.interference.profile = profile_from_gains(gains);
    }
    const double r = scenario.reuse_factor;
    return ofdm.bandwidth / r * ofdm.overhead() * rate_quadrature(model).value;
}

void DistributionPlan::validate() const {
    if (num_drops < 1 || samples_per_drop < 1 || threads < 1) {
        throw std::invalid_argument("DistributionPlan: drops, samples and threads must be >= 1");
    }
}

double RateDistribution::cdf(double rate) const {
    if (samples.empty()) {
        return 0.0;
    }
    const auto it = std::upper_bound(samples.begin(), samples.end(), rate);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
}

double RateDistribution::quantile(double p) const {
    if (samples.empty()) {
        throw std::logic_error("quantile of an empty distribution");
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::domain_error("quantile: p must lie in (0, 1]");
    }
    const double n = static_cast<double>(samples.size());
    const auto idx = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n - 1e-9))) - 1;
    return samples[std::min(idx, samples.size() - 1)];
}

RateDistribution rate_distribution(const NetworkScenario& scenario, const OfdmParams& ofdm,
                                   const DistributionPlan& plan) {
    scenario.validate();
    ofdm.validate();
    plan.validate();
    const std::vector<Point> grid = build_hex_grid(scenario);
    const int k = scenario.users_per_cell;
    const std::size_t per_drop = static_cast<std::size_t>(plan.samples_per_drop) * static_cast<std::size_t>(k);
    std::vector<double> samples(per_drop * static_cast<std::size_t>(plan.num_drops));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int d = next++; d < plan.num_drops; d = next++) {
            RngStream rng(plan.seed, static_cast<std::uint64_t>(d));
            const UserDrop drop = drop_users(scenario, grid, rng);
            std::size_t pos = per_drop * static_cast<std::size_t>(d);
            for (int s = 0; s < plan.samples_per_drop; ++s) {
                for (int u = 0; u < k; ++u) {
                    samples[pos++] = net_rate(scenario, ofdm, drop, u, rng);
                }
            }
        }
    };
    const int n_threads = std::min(plan.threads, plan.num_drops);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    RateDistribution out;
    double total = 0.0;
    for (double v : samples) {
        total += v;
    }
    out.mean = total / static_cast<double>(samples.size());
    std::sort(samples.begin(), samples.end());
    out.samples = std::move(samples);
    out.percentile5 = out.quantile(0.05);
    return out;
}

}  // namespace mumimo
