// SPDX-License-Identifier: Apache-2.0
//
// Statistical model of the ZF output SINR of one user:
//
//   gamma = p_u X / (p_u Z + 1)
//   X ~ Erlang(N - K + 1, beta_llk)
//   Z = sum over interfering users of beta_lik * Exp(1)
//
// with X and Z independent.

#pragma once

#include <vector>

#include "mumimo/fading.hpp"
#include "mumimo/quality.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

struct DesiredPowerDist {
    int shape = 1;       // N - K + 1
    double scale = 1.0;  // beta_llk

    void validate() const;
};

struct InterferencePowerDist {
    CharacteristicExpansion expansion;  // empty when there is no interference
    InterferenceProfile profile;

    bool empty() const { return profile.diagonal.empty(); }
    double mean() const { return profile.trace(); }
};

struct SinrModel {
    DesiredPowerDist desired;
    InterferencePowerDist interference;
    double p_u = 1.0;
};

SinrModel make_sinr_model(const SystemConfig& config, const LargeScaleFading& fading, int home_cell, int user,
                          const ProfileOptions& options = {});

// Reuses an already built profile and expansion for cell `profile.home_cell`.
SinrModel make_sinr_model(const SystemConfig& config, const LargeScaleFading& fading,
                          const InterferenceProfile& profile, const CharacteristicExpansion& expansion,
                          int user);

double pdf_x(const DesiredPowerDist& dist, double x);
double cdf_x(const DesiredPowerDist& dist, double x);

// Density and distribution function of Z from the exponential-mixture
// expansion. Both are zero for an empty profile (Z is then identically 0).
double pdf_z(const InterferencePowerDist& dist, double z);
double cdf_z(const InterferencePowerDist& dist, double z);

enum class MgfPath { automatic, general, distinct };

// E[exp(-s gamma)].
Evaluation mgf_sinr(const SinrModel& model, double s, MgfPath path = MgfPath::automatic);

// Limit of mgf_sinr as p_u -> infinity (the 1/p_u terms dropped).
Evaluation mgf_sinr_high_snr(const SinrModel& model, double s, MgfPath path = MgfPath::automatic);

// Quadrature forms of the two MGFs over the density of Z.
Evaluation mgf_sinr_quadrature(const SinrModel& model, double s, bool high_snr);

struct PowerDraw {
    double x;
    double z;
};

PowerDraw sample_powers(const SinrModel& model, RngStream& rng);
double sample_sinr(const SinrModel& model, RngStream& rng);

}  // namespace mumimo
