// SPDX-License-Identifier: Apache-2.0
//
// Hexagonal multicell network with path loss, log-normal shadowing and
// frequency reuse. Users are dropped uniformly in their hexagon and the net
// uplink rate is drawn from the equivalent (X, Z) law for each drop.

#pragma once

#include <cstdint>
#include <vector>

#include "mumimo/fading.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

struct NetworkScenario {
    double cell_radius = 1000.0;          // center to vertex, m
    double exclusion_radius = 100.0;      // r_h, m
    double interference_horizon = 8000.0; // m
    double path_loss_exponent = 3.8;
    double shadow_sigma_db = 8.0;
    int reuse_factor = 1;                 // 1, 3 or 7
    int users_per_cell = 10;
    int antennas = 20;
    double transmit_snr = 10.0;           // linear

    void validate() const;
};

struct OfdmParams {
    double symbol_duration = 71.4e-6;  // T_s
    double useful_duration = 66.7e-6;  // T_u
    double bandwidth = 20e6;           // B, Hz

    void validate() const;
    double overhead() const { return useful_duration / symbol_duration; }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b);

// True when p lies in the pointy-top hexagon of circumradius `radius` centered at c.
bool inside_hexagon(Point p, Point c, double radius);

// Co-channel base stations within the horizon; the home cell at the origin comes first.
std::vector<Point> build_hex_grid(const NetworkScenario& scenario);

struct UserDrop {
    std::vector<Point> cells;               // co-channel BS positions, home first
    std::vector<std::vector<Point>> users;  // users[i][k]
    LargeScaleFading fading;                // beta_0ik toward the home BS; other rows unused
};

UserDrop drop_users(const NetworkScenario& scenario, const std::vector<Point>& grid, RngStream& rng);

// One draw of (B / r)(T_u / T_s) log2(1 + p_u X / (p_u Z + 1 / r)) in bit/s.
double net_rate(const NetworkScenario& scenario, const OfdmParams& ofdm, const UserDrop& drop, int user,
                RngStream& rng);

// Expectation of net_rate over small-scale fading for a fixed drop.
double net_rate_mean(const NetworkScenario& scenario, const OfdmParams& ofdm, const UserDrop& drop, int user);

struct DistributionPlan {
    int num_drops = 200;
    int samples_per_drop = 100;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;
};

struct RateDistribution {
    std::vector<double> samples;  // sorted ascending, bit/s
    double mean = 0.0;
    double percentile5 = 0.0;     // rate met or exceeded with probability 0.95

    // Right-continuous empirical CDF.
    double cdf(double rate) const;
    // Smallest sample x with cdf(x) >= p.
    double quantile(double p) const;
};

RateDistribution rate_distribution(const NetworkScenario& scenario, const OfdmParams& ofdm,
                                   const DistributionPlan& plan);

}  // namespace mumimo
