// SPDX-License-Identifier: Apache-2.0

#include "mumimo/asymptotic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mumimo {
namespace {

constexpr double kKappaTolerance = 1e-6;

void check_index(const LargeScaleFading& fading, int cell, int user) {
    if (cell < 0 || cell >= fading.num_cells() || user < 0 || user >= fading.users_per_cell()) {
        throw std::out_of_range("asymptotic: cell or user index out of range");
    }
}

void check_kappa(double kappa) {
    if (!(kappa > 1.0) || !std::isfinite(kappa)) {
        throw std::domain_error("asymptotic: kappa must be finite and > 1");
    }
}

void check_energy(double energy) {
    if (!(energy > 0.0) || !std::isfinite(energy)) {
        throw std::domain_error("asymptotic: E_u must be finite and > 0");
    }
}

}  // namespace

AsymptoticRegime AsymptoticRegime::fixed_K_growing_N() { return {}; }

AsymptoticRegime AsymptoticRegime::fixed_ratio(double kappa) {
    AsymptoticRegime r{RegimeKind::fixed_ratio, kappa, 0.0};
    r.validate();
    return r;
}

AsymptoticRegime AsymptoticRegime::power_scaled(double energy) {
    AsymptoticRegime r{RegimeKind::power_scaled, 0.0, energy};
    r.validate();
    return r;
}

AsymptoticRegime AsymptoticRegime::power_scaled_fixed_ratio(double energy, double kappa) {
    AsymptoticRegime r{RegimeKind::power_scaled_fixed_ratio, kappa, energy};
    r.validate();
    return r;
}

void AsymptoticRegime::validate() const {
    if (kind == RegimeKind::fixed_ratio || kind == RegimeKind::power_scaled_fixed_ratio) {
        check_kappa(kappa);
    }
    if (kind == RegimeKind::power_scaled || kind == RegimeKind::power_scaled_fixed_ratio) {
        check_energy(energy);
    }
}

double mean_cross_gain(const LargeScaleFading& fading, int cell) {
    check_index(fading, cell, 0);
    double total = 0.0;
    for (int i = 0; i < fading.num_cells(); ++i) {
        if (i == cell) {
            continue;
        }
        double s = 0.0;
        for (int k = 0; k < fading.users_per_cell(); ++k) {
            s += fading(cell, i, k);
        }
        total += s / fading.users_per_cell();
    }
    return total;
}

double deterministic_sir(const LargeScaleFading& fading, int cell, int user, double kappa) {
    check_index(fading, cell, user);
    check_kappa(kappa);
    const double cross = mean_cross_gain(fading, cell);
    if (cross == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return fading(cell, cell, user) * (kappa - 1.0) / cross;
}

double power_scaled_limit_rate(const LargeScaleFading& fading, int cell, int user, double energy) {
    check_index(fading, cell, user);
    check_energy(energy);
    return std::log2(1.0 + fading(cell, cell, user) * energy);
}

double power_scaled_fixed_ratio_sinr(const LargeScaleFading& fading, int cell, int user, double energy,
                                     double kappa) {
    check_index(fading, cell, user);
    check_energy(energy);
    check_kappa(kappa);
    const double beta = fading(cell, cell, user);
    return beta * energy * (1.0 - 1.0 / kappa) / (energy / kappa * mean_cross_gain(fading, cell) + 1.0);
}

double limiting_sinr(const LargeScaleFading& fading, int cell, int user, const AsymptoticRegime& regime) {
    regime.validate();
    check_index(fading, cell, user);
    switch (regime.kind) {
        case RegimeKind::fixed_K_growing_N:
            return std::numeric_limits<double>::infinity();
        case RegimeKind::fixed_ratio:
            return deterministic_sir(fading, cell, user, regime.kappa);
        case RegimeKind::power_scaled:
            return fading(cell, cell, user) * regime.energy;
        case RegimeKind::power_scaled_fixed_ratio:
            return power_scaled_fixed_ratio_sinr(fading, cell, user, regime.energy, regime.kappa);
    }
    return 0.0;
}

double required_kappa(const LargeScaleFading& fading, int cell, int user, double energy, double eta) {
    check_index(fading, cell, user);
    check_energy(energy);
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::domain_error("required_kappa: eta must lie in (0, 1)");
    }
    const double target = eta * power_scaled_limit_rate(fading, cell, user, energy);
    auto rate = [&](double kappa) {
        return std::log2(1.0 + power_scaled_fixed_ratio_sinr(fading, cell, user, energy, kappa));
    };
    double lo = 1.0;
    double hi = 2.0;
    while (rate(hi) < target) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > kKappaTolerance * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        if (rate(mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double required_kappa_for_rate(const LargeScaleFading& fading, int cell, int user, double rate_limit,
                               double eta) {
    check_index(fading, cell, user);
    if (!(rate_limit > 0.0)) {
        throw std::domain_error("required_kappa_for_rate: rate_limit must be positive");
    }
    const double energy = std::expm1(rate_limit * std::log(2.0)) / fading(cell, cell, user);
    return required_kappa(fading, cell, user, energy, eta);
}

int antennas_for_kappa(double kappa, int users) {
    check_kappa(kappa);
    if (users < 1) {
        throw std::domain_error("antennas_for_kappa: users must be >= 1");
    }
    return static_cast<int>(std::ceil(kappa * users - 1e-9));
}

}  // namespace mumimo
