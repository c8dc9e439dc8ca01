// SPDX-License-Identifier: Apache-2.0

#include "mumimo/sinrdist.hpp"

#include <cmath>
#include <stdexcept>

#include "mumimo/quadrature.hpp"
#include "mumimo/specfun.hpp"
#include "mumimo/tracked.hpp"

namespace mumimo {
namespace {

// 2F0 with the closed form replaced by quadrature when it has lost digits.
Tracked hyp2f0_guarded(int n, int p, long double x) {
    const Tracked t = specfun::hyp2f0_neg_tracked(n, p, x);
    if (t.finite() && t.relative_error() <= specfun::kClosedFormTolerance) {
        return t;
    }
    specfun::QuadratureSpec spec;
    spec.relative_tolerance = 1e-12;
    spec.max_subdivisions = 4000;
    const auto q = specfun::hyp2f0_neg_quadrature(n, p, static_cast<double>(x), spec);
    return {q.value, std::max<long double>(q.error, 1e-12L * std::fabs(q.value))};
}

// Accepts a tracked closed form or reroutes to quadrature.
Evaluation settle(const Tracked& t, long double condition, const SinrModel& model, double s, bool high_snr) {
    if (t.finite() && t.relative_error() <= kGuardTolerance) {
        return {static_cast<double>(t.value), Quality::clean, static_cast<double>(condition)};
    }
    Evaluation e = mgf_sinr_quadrature(model, s, high_snr);
    e.condition = static_cast<double>(condition);
    return e;
}

Evaluation mgf_general(const SinrModel& model, double s, bool high_snr) {
    const int nx = model.desired.shape;
    const long double beta = model.desired.scale;
    const long double c = high_snr ? 0.0L : 1.0L / model.p_u;
    const long double d = c + beta * s;
    const long double w = -beta * s / d;
    TrackedSum acc;
    for (const auto& term : model.interference.expansion.terms) {
        const Tracked chi = Tracked::from_double(term.chi);
        long double wp = 1.0L;
        for (int p = 0; p <= nx; ++p) {
            const Tracked f = hyp2f0_guarded(term.order, p, term.mu / d);
            acc.add(chi * f * (specfun::binomial(nx, p) * wp));
            wp *= w;
        }
    }
    return settle(acc.result(), acc.condition(), model, s, high_snr);
}

Evaluation mgf_distinct(const SinrModel& model, double s, bool high_snr) {
    const int nx = model.desired.shape;
    const long double beta = model.desired.scale;
    const long double c = high_snr ? 0.0L : 1.0L / model.p_u;
    const long double d = c + beta * s;
    const long double w = -beta * s / d;
    TrackedSum acc;
    for (const auto& term : model.interference.expansion.terms) {
        if (term.order != 1) {
            throw std::invalid_argument("mgf_sinr: distinct path needs simple eigenvalues");
        }
        const Tracked chi = Tracked::from_double(term.chi);
        const long double z = d / term.mu;
        // 2F0(1, p; ; -1/z) = z e^z E_p(z)
        const std::vector<long double> scaled = specfun::expint_en_scaled_sequence(std::max(nx, 1), z);
        long double wp = 1.0L;
        for (int p = 0; p <= nx; ++p) {
            const long double f = p == 0 ? 1.0L : z * scaled[static_cast<std::size_t>(p - 1)];
            acc.add(chi * Tracked::approx(f, 64.0L * kLongEps) * (specfun::binomial(nx, p) * wp));
            wp *= w;
        }
    }
    return settle(acc.result(), acc.condition(), model, s, high_snr);
}

}  // namespace

void DesiredPowerDist::validate() const {
    if (shape < 1 || !(scale > 0.0)) {
        throw std::invalid_argument("DesiredPowerDist: shape must be >= 1 and scale positive");
    }
}

SinrModel make_sinr_model(const SystemConfig& config, const LargeScaleFading& fading,
                          const InterferenceProfile& profile, const CharacteristicExpansion& expansion,
                          int user) {
    config.validate();
    fading.check_compatible(config);
    if (user < 0 || user >= config.users_per_cell) {
        throw std::out_of_range("make_sinr_model: user index out of range");
    }
    SinrModel m;
    m.desired.shape = config.antennas - config.users_per_cell + 1;
    m.desired.scale = fading(profile.home_cell, profile.home_cell, user);
    m.interference.profile = profile;
    m.interference.expansion = expansion;
    m.p_u = config.transmit_snr;
    return m;
}

SinrModel make_sinr_model(const SystemConfig& config, const LargeScaleFading& fading, int home_cell, int user,
                          const ProfileOptions& options) {
    const InterferenceProfile profile = build_profile(config, fading, home_cell, options);
    const CharacteristicExpansion expansion =
        profile.empty() ? CharacteristicExpansion{} : characteristic_coefficients(profile);
    return make_sinr_model(config, fading, profile, expansion, user);
}

double pdf_x(const DesiredPowerDist& dist, double x) {
    dist.validate();
    if (x < 0.0) {
        throw std::domain_error("pdf_x: x must be non-negative");
    }
    const int n = dist.shape;
    if (x == 0.0) {
        return n == 1 ? 1.0 / dist.scale : 0.0;
    }
    const double y = x / dist.scale;
    return std::exp((n - 1) * std::log(y) - y - std::lgamma(static_cast<double>(n))) / dist.scale;
}

double cdf_x(const DesiredPowerDist& dist, double x) {
    dist.validate();
    if (x < 0.0) {
        throw std::domain_error("cdf_x: x must be non-negative");
    }
    const long double y = x / dist.scale;
    long double term = 1.0L;
    long double sum = 0.0L;
    for (int p = 0; p < dist.shape; ++p) {
        sum += term;
        term *= y / (p + 1);
    }
    return static_cast<double>(1.0L - std::exp(-y) * sum);
}

double pdf_z(const InterferencePowerDist& dist, double z) {
    if (z < 0.0) {
        throw std::domain_error("pdf_z: z must be non-negative");
    }
    long double sum = 0.0L;
    for (const auto& t : dist.expansion.terms) {
        const long double y = z / t.mu;
        if (z == 0.0) {
            if (t.order == 1) {
                sum += t.chi / t.mu;
            }
            continue;
        }
        sum += t.chi * std::exp((t.order - 1) * std::log(y) - y - std::lgamma(static_cast<long double>(t.order))) / t.mu;
    }
    return static_cast<double>(sum);
}

double cdf_z(const InterferencePowerDist& dist, double z) {
    if (z < 0.0) {
        throw std::domain_error("cdf_z: z must be non-negative");
    }
    if (dist.expansion.empty()) {
        return 1.0;
    }
    long double tail = 0.0L;
    for (const auto& t : dist.expansion.terms) {
        const long double y = z / t.mu;
        long double term = 1.0L;
        long double sum = 0.0L;
        for (int j = 0; j < t.order; ++j) {
            sum += term;
            term *= y / (j + 1);
        }
        tail += t.chi * std::exp(-y) * sum;
    }
    return static_cast<double>(1.0L - tail);
}

Evaluation mgf_sinr_quadrature(const SinrModel& model, double s, bool high_snr) {
    const double beta = model.desired.scale;
    const int nx = model.desired.shape;
    const double c = high_snr ? 0.0 : 1.0 / model.p_u;
    if (model.interference.empty()) {
        if (high_snr) {
            return {s == 0.0 ? 1.0 : 0.0, Quality::clean, 1.0};
        }
        return {std::pow(1.0 + beta * s / c, -nx), Quality::clean, 1.0};
    }
    auto f = [&](double z) {
        const double ratio = (z + c) / (z + c + beta * s);
        return pdf_z(model.interference, z) * std::pow(ratio, nx);
    };
    specfun::QuadratureSpec spec;
    spec.relative_tolerance = 1e-11;
    spec.max_subdivisions = 4000;
    const auto q = specfun::integrate_to_infinity(f, 0.0, model.interference.mean(), spec);
    // The mixture density itself cancels when sum |chi| is large.
    const bool density_ok = model.interference.expansion.magnitude() * 1e-16 < kGuardTolerance;
    const Quality quality = (q.converged && density_ok) ? Quality::fallback : Quality::degraded;
    return {q.value, quality, 1.0};
}

Evaluation mgf_sinr(const SinrModel& model, double s, MgfPath path) {
    if (s < 0.0) {
        throw std::domain_error("mgf_sinr: s must be non-negative");
    }
    if (s == 0.0) {
        return {1.0, Quality::clean, 1.0};
    }
    if (std::isinf(s)) {
        return {0.0, Quality::clean, 1.0};
    }
    if (model.interference.empty()) {
        return mgf_sinr_quadrature(model, s, false);
    }
    if (path == MgfPath::distinct || (path == MgfPath::automatic && model.interference.profile.all_distinct())) {
        return mgf_distinct(model, s, false);
    }
    return mgf_general(model, s, false);
}

Evaluation mgf_sinr_high_snr(const SinrModel& model, double s, MgfPath path) {
    if (s < 0.0) {
        throw std::domain_error("mgf_sinr_high_snr: s must be non-negative");
    }
    if (s == 0.0) {
        return {1.0, Quality::clean, 1.0};
    }
    if (std::isinf(s)) {
        return {0.0, Quality::clean, 1.0};
    }
    if (model.interference.empty()) {
        return mgf_sinr_quadrature(model, s, true);
    }
    if (path == MgfPath::distinct || (path == MgfPath::automatic && model.interference.profile.all_distinct())) {
        return mgf_distinct(model, s, true);
    }
    return mgf_general(model, s, true);
}

PowerDraw sample_powers(const SinrModel& model, RngStream& rng) {
    double x = 0.0;
    for (int j = 0; j < model.desired.shape; ++j) {
        x += rng.exponential();
    }
    x *= model.desired.scale;
    double z = 0.0;
    for (double g : model.interference.profile.diagonal) {
        z += g * rng.exponential();
    }
    return {x, z};
}

double sample_sinr(const SinrModel& model, RngStream& rng) {
    const PowerDraw d = sample_powers(model, rng);
    return model.p_u * d.x / (model.p_u * d.z + 1.0);
}

}  // namespace mumimo
