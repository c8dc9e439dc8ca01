// SPDX-License-Identifier: Apache-2.0
//
// Exact and approximate link metrics of one ZF user: ergodic rate and its
// lower bound, M-PSK symbol error rate, and outage probability.
//
// Every entry point has two forms: one taking the tuple
// (config, fading, expansion, user, cell) and one taking a prepared
// SinrModel. Alternating closed forms are evaluated with tracked error
// bounds and fall back to quadrature when the bound exceeds
// kGuardTolerance; the returned quality says which path produced the value.

#pragma once

#include "mumimo/fading.hpp"
#include "mumimo/quadrature.hpp"
#include "mumimo/quality.hpp"
#include "mumimo/sinrdist.hpp"

namespace mumimo {

struct ModulationScheme {
    int order = 4;           // M
    double g_mpsk = 0.5;     // sin^2(pi / M)
    double theta_max = 0.0;  // pi - pi / M

    static ModulationScheme psk(int order);
};

enum class RateMethod { exact_general, exact_distinct, lower_bound, quadrature };

const char* to_string(RateMethod m);

struct RateResult {
    double value = 0.0;  // bits/s/Hz
    RateMethod method = RateMethod::exact_general;
    Quality quality = Quality::clean;
    double condition = 1.0;
};

enum class FormulaPath { automatic, general, distinct };

// Model of user k in cell l; the expansion must belong to cell l.
SinrModel model_for(const SystemConfig& config, const LargeScaleFading& fading,
                    const CharacteristicExpansion& expansion, int user, int cell);

RateResult rate_exact(const SinrModel& model, FormulaPath path = FormulaPath::automatic);
RateResult rate_exact(const SystemConfig& config, const LargeScaleFading& fading,
                      const CharacteristicExpansion& expansion, int user, int cell,
                      FormulaPath path = FormulaPath::automatic);

// E[log2(1 + gamma)] from the single integral
//   log2(e) int_0^inf M_Z(p_u s) (1 - (1 + p_u beta s)^-(N-K+1)) e^-s / s ds,
// which involves no characteristic coefficients.
RateResult rate_quadrature(const SinrModel& model);

RateResult rate_lower_bound(const SinrModel& model);
RateResult rate_lower_bound(const SystemConfig& config, const LargeScaleFading& fading,
                            const CharacteristicExpansion& expansion, int user, int cell);

// Mean over the K users of cell l times K.
RateResult sum_rate(const SystemConfig& config, const LargeScaleFading& fading, int cell,
                    FormulaPath path = FormulaPath::automatic);

Evaluation ser_exact(const SinrModel& model, const ModulationScheme& modulation,
                     const specfun::QuadratureSpec& integration = {});
Evaluation ser_exact(const SystemConfig& config, const LargeScaleFading& fading,
                     const CharacteristicExpansion& expansion, const ModulationScheme& modulation, int user,
                     int cell, const specfun::QuadratureSpec& integration = {});

Evaluation ser_high_snr(const SinrModel& model, const ModulationScheme& modulation,
                        const specfun::QuadratureSpec& integration = {});
Evaluation ser_high_snr(const SystemConfig& config, const LargeScaleFading& fading,
                        const CharacteristicExpansion& expansion, const ModulationScheme& modulation, int user,
                        int cell);

Evaluation ser_approx(const SinrModel& model, const ModulationScheme& modulation);
Evaluation ser_approx(const SystemConfig& config, const LargeScaleFading& fading,
                      const CharacteristicExpansion& expansion, const ModulationScheme& modulation, int user,
                      int cell);

Evaluation outage_exact(const SinrModel& model, double gamma_th, FormulaPath path = FormulaPath::automatic);
Evaluation outage_exact(const SystemConfig& config, const LargeScaleFading& fading,
                        const CharacteristicExpansion& expansion, int user, int cell, double gamma_th,
                        FormulaPath path = FormulaPath::automatic);

Evaluation outage_small_threshold(const SinrModel& model, double gamma_th,
                                  FormulaPath path = FormulaPath::automatic);
Evaluation outage_small_threshold(const SystemConfig& config, const LargeScaleFading& fading,
                                  const CharacteristicExpansion& expansion, int user, int cell, double gamma_th,
                                  FormulaPath path = FormulaPath::automatic);

// P(gamma <= gamma_th) as a quadrature over the density of Z.
Evaluation outage_quadrature(const SinrModel& model, double gamma_th);

}  // namespace mumimo
