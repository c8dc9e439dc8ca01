// SPDX-License-Identifier: Apache-2.0
//
// Large-antenna limits of the ZF uplink. kappa = N / K throughout.

#pragma once

#include "mumimo/fading.hpp"

namespace mumimo {

enum class RegimeKind { fixed_K_growing_N, fixed_ratio, power_scaled, power_scaled_fixed_ratio };

struct AsymptoticRegime {
    RegimeKind kind = RegimeKind::fixed_K_growing_N;
    double kappa = 0.0;   // used by the fixed-ratio kinds, > 1
    double energy = 0.0;  // E_u, used by the power-scaled kinds, > 0

    static AsymptoticRegime fixed_K_growing_N();
    static AsymptoticRegime fixed_ratio(double kappa);
    static AsymptoticRegime power_scaled(double energy);
    static AsymptoticRegime power_scaled_fixed_ratio(double energy, double kappa);

    void validate() const;
};

// Sum over i != l of the mean of beta_lik over k.
double mean_cross_gain(const LargeScaleFading& fading, int cell);

// beta_llk (kappa - 1) / sum_{i != l} Tr(D_li) / K. +inf when L = 1.
double deterministic_sir(const LargeScaleFading& fading, int cell, int user, double kappa);

// log2(1 + beta_llk E_u), the rate reached with p_u = E_u / N at fixed K.
double power_scaled_limit_rate(const LargeScaleFading& fading, int cell, int user, double energy);

double power_scaled_fixed_ratio_sinr(const LargeScaleFading& fading, int cell, int user, double energy,
                                     double kappa);

// Limiting SINR of the regime; fixed_K_growing_N yields +inf.
double limiting_sinr(const LargeScaleFading& fading, int cell, int user, const AsymptoticRegime& regime);

// Smallest kappa > 1 with log2(1 + power_scaled_fixed_ratio_sinr) >= eta R_inf.
double required_kappa(const LargeScaleFading& fading, int cell, int user, double energy, double eta);

// Same, with E_u chosen so that log2(1 + beta_llk E_u) = rate_limit.
double required_kappa_for_rate(const LargeScaleFading& fading, int cell, int user, double rate_limit,
                               double eta);

// ceil(kappa K), the antenna count that realizes kappa for K users.
int antennas_for_kappa(double kappa, int users);

}  // namespace mumimo
