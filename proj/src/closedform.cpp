// SPDX-License-Identifier: Apache-2.0

#include "mumimo/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "mumimo/specfun.hpp"
#include "mumimo/tracked.hpp"

namespace mumimo {
namespace {

constexpr long double kLog2e = std::numbers::log2e_v<long double>;
using specfun::binomial;
using specfun::factorial;

long double sign_of_power(int k) { return k % 2 == 0 ? 1.0L : -1.0L; }

// ln M_Z(t) = -sum_m tau_m ln(1 + mu_m t).
double log_mgf_z(const InterferenceProfile& profile, double t) {
    double s = 0.0;
    for (std::size_t m = 0; m < profile.mu.size(); ++m) {
        s -= profile.tau[m] * std::log1p(profile.mu[m] * t);
    }
    return s;
}

specfun::QuadratureSpec fallback_spec() {
    specfun::QuadratureSpec spec;
    spec.relative_tolerance = 1e-12;
    spec.max_subdivisions = 4000;
    return spec;
}

// E[ln(1 + p_u Z)] = int_0^inf (1 - M_Z(p_u s)) e^-s / s ds.
specfun::QuadratureResult log_interference_quadrature(const SinrModel& model) {
    auto f = [&](double s) {
        return -std::expm1(log_mgf_z(model.interference.profile, model.p_u * s)) * std::exp(-s) / s;
    };
    return specfun::integrate_to_infinity(f, 0.0, 1.0, fallback_spec());
}

struct Closed {
    Tracked value;
    long double condition;
};

Closed invalid() {
    return {{std::numeric_limits<long double>::quiet_NaN(), std::numeric_limits<long double>::infinity()},
            std::numeric_limits<long double>::infinity()};
}

Closed rate_general_closed(const SinrModel& model) {
    const int nk = model.desired.shape - 1;
    const long double beta = model.desired.scale;
    const long double pu = model.p_u;
    const long double a = 1.0L / beta;
    const long double b = 1.0L / (beta * pu);
    const auto& profile = model.interference.profile;
    const auto& terms = model.interference.expansion.terms;
    TrackedSum acc;
    std::size_t idx = 0;
    for (std::size_t m = 0; m < profile.mu.size(); ++m) {
        const long double mu = profile.mu[m];
        const int tau = profile.tau[m];
        const long double alpha = 1.0L / mu - 1.0L / beta;
        if (!(alpha > 0.0L)) {
            return invalid();
        }
        const std::vector<Tracked> J = specfun::lemma1_j_sequence(b, alpha / a, tau - 1 + nk);
        const long double z = 1.0L / (mu * pu);
        // e^b from the bracket and e^(alpha b / a) from the Ei-product kernel.
        const Tracked e_pref = tracked_exp(b + alpha * b / a);
        // (-b)^j and (beta p_u)^-j for the Ei-product kernel and the U sums.
        std::vector<Tracked> neg_b_pow(static_cast<std::size_t>(tau));
        for (int j = 0; j < tau; ++j) {
            neg_b_pow[static_cast<std::size_t>(j)] = tracked_pow(-b, j);
        }
        std::vector<Tracked> inv_bp_pow(static_cast<std::size_t>(nk) + 1);
        for (int j = 0; j <= nk; ++j) {
            inv_bp_pow[static_cast<std::size_t>(j)] = tracked_pow(beta * pu, -j);
        }
        for (int n = 1; n <= tau; ++n, ++idx) {
            const Tracked chi = Tracked::from_double(terms[idx].chi);
            // V_c = (-1)^c (beta p_u)^-(c-1) U(n, n+c, z)
            std::vector<Tracked> V(static_cast<std::size_t>(nk) + 1);
            for (int c = 1; c <= nk; ++c) {
                V[static_cast<std::size_t>(c)] = specfun::tricomi_u_tracked(n, n + c, z) *
                                                 inv_bp_pow[static_cast<std::size_t>(c - 1)] * sign_of_power(c);
            }
            const int mm = n - 1;
            const Tracked a_pow = tracked_pow(a, -(mm + 1));
            const Tracked u_pref = tracked_pow(pu, -n) * factorial(n - 1);
            const Tracked mu_pow = tracked_pow(mu, -n);
            for (int p = 0; p <= nk; ++p) {
                const int np = nk - p;
                TrackedSum isum;
                for (int i = 0; i <= mm; ++i) {
                    isum.add(neg_b_pow[static_cast<std::size_t>(mm - i)] *
                             (binomial(mm, i) * J[static_cast<std::size_t>(np + i)]));
                }
                TrackedSum bracket;
                bracket.add(-(isum.result() * e_pref * a_pow));
                // q = np + 1 - c, so (q-1)! (-1)^q = (np-c)! (-1)^(np+1-c).
                TrackedSum usum;
                for (int c = 1; c <= np; ++c) {
                    usum.add(V[static_cast<std::size_t>(c)] * factorial(np - c));
                }
                bracket.add(u_pref * usum.result() * sign_of_power(np + 1));
                const Tracked pref = chi * mu_pow * (sign_of_power(np) / (factorial(n - 1) * factorial(np)));
                acc.add(pref * bracket.result());
            }
        }
    }
    return {acc.result() * kLog2e, acc.condition()};
}

Closed rate_distinct_closed(const SinrModel& model) {
    const int nk = model.desired.shape - 1;
    const long double beta = model.desired.scale;
    const long double pu = model.p_u;
    const long double a = 1.0L / beta;
    const long double b = 1.0L / (beta * pu);
    TrackedSum acc;
    for (const auto& term : model.interference.expansion.terms) {
        if (term.order != 1) {
            throw std::invalid_argument("rate_exact: distinct path needs simple eigenvalues");
        }
        const long double mu = term.mu;
        const long double alpha = 1.0L / mu - 1.0L / beta;
        if (!(alpha > 0.0L)) {
            return invalid();
        }
        const std::vector<Tracked> J = specfun::lemma1_j_sequence(b, alpha / a, nk);
        const long double z = 1.0L / (mu * pu);
        const Tracked e_pref = tracked_exp(b + alpha * b / a);
        const Tracked chi = Tracked::from_double(term.chi);
        for (int p = 0; p <= nk; ++p) {
            const int np = nk - p;
            TrackedSum bracket;
            bracket.add(-(J[static_cast<std::size_t>(np)] * e_pref / a));
            for (int q = 1; q <= np; ++q) {
                const int c = np + 1 - q;
                // e^z mu^c Gamma(c, z) with e^z Gamma(c, z) = (c-1)! sum_{j<c} z^j / j!
                const Tracked g = specfun::upper_gamma_scaled_tracked(c, z) * factorial(c - 1);
                const Tracked coef = tracked_pow(beta, -(np - q)) * tracked_pow(mu, c) *
                                     (factorial(q - 1) * sign_of_power(q));
                bracket.add(coef * g);
            }
            const Tracked pref = chi * (sign_of_power(np) / (factorial(np) * mu));
            acc.add(pref * bracket.result());
        }
    }
    return {acc.result() * kLog2e, acc.condition()};
}

bool use_distinct(const SinrModel& model, FormulaPath path) {
    if (path == FormulaPath::distinct) {
        return true;
    }
    return path == FormulaPath::automatic && model.interference.profile.all_distinct();
}

bool accepted(const Tracked& t) { return t.finite() && t.relative_error() <= kGuardTolerance; }

const specfun::GaussLegendreRule& rule(int n) {
    static const specfun::GaussLegendreRule r32 = specfun::gauss_legendre(32);
    static const specfun::GaussLegendreRule r64 = specfun::gauss_legendre(64);
    return n == 32 ? r32 : r64;
}

template <class Mgf>
Evaluation ser_integral(const Mgf& mgf, const ModulationScheme& mod, const specfun::QuadratureSpec& spec) {
    Quality quality = Quality::clean;
    double condition = 1.0;
    auto integrand = [&](double theta) {
        const double sn = std::sin(theta);
        if (sn == 0.0) {
            return 0.0;
        }
        const Evaluation e = mgf(mod.g_mpsk / (sn * sn));
        quality = worst(quality, e.quality);
        condition = std::max(condition, e.condition);
        return e.value;
    };
    const double v64 = specfun::apply_rule(rule(64), integrand, 0.0, mod.theta_max);
    const double v32 = specfun::apply_rule(rule(32), integrand, 0.0, mod.theta_max);
    double value = v64;
    if (std::fabs(v64 - v32) > 1e-10 * std::fabs(v64) + 1e-300) {
        const auto q = specfun::integrate(integrand, 0.0, mod.theta_max, spec);
        if (!q.converged) {
            throw std::runtime_error("ser: theta integration did not reach the requested tolerance");
        }
        value = q.value;
    }
    value /= std::numbers::pi;
    return {std::clamp(value, 0.0, 1.0), quality, condition};
}

// P(X <= g (Z + c)) integrated over the density of Z.
Evaluation outage_quadrature_impl(const SinrModel& model, double gamma_th, double c) {
    if (model.interference.empty()) {
        return {cdf_x(model.desired, gamma_th * c), Quality::clean, 1.0};
    }
    auto f = [&](double z) { return pdf_z(model.interference, z) * cdf_x(model.desired, gamma_th * (z + c)); };
    const auto q = specfun::integrate_to_infinity(f, 0.0, model.interference.mean(), fallback_spec());
    const bool density_ok = model.interference.expansion.magnitude() * 1e-16 < kGuardTolerance;
    return {std::clamp(q.value, 0.0, 1.0), (q.converged && density_ok) ? Quality::fallback : Quality::degraded,
            1.0};
}

Evaluation settle_outage(const Tracked& tail, long double scale, long double condition, const SinrModel& model,
                         double gamma_th, double c) {
    const long double abs_err = tail.error * scale;
    if (tail.finite() && std::isfinite(static_cast<double>(abs_err)) && abs_err <= kGuardTolerance) {
        const double v = static_cast<double>(1.0L - scale * tail.value);
        return {std::clamp(v, 0.0, 1.0), Quality::clean, static_cast<double>(condition)};
    }
    Evaluation e = outage_quadrature_impl(model, gamma_th, c);
    e.condition = static_cast<double>(condition);
    return e;
}

}  // namespace

ModulationScheme ModulationScheme::psk(int order) {
    if (order < 2) {
        throw std::invalid_argument("ModulationScheme: PSK order must be >= 2");
    }
    ModulationScheme m;
    m.order = order;
    const double s = std::sin(std::numbers::pi / order);
    m.g_mpsk = s * s;
    m.theta_max = std::numbers::pi - std::numbers::pi / order;
    return m;
}

const char* to_string(RateMethod m) {
    switch (m) {
        case RateMethod::exact_general:
            return "exact_general";
        case RateMethod::exact_distinct:
            return "exact_distinct";
        case RateMethod::lower_bound:
            return "lower_bound";
        case RateMethod::quadrature:
            return "quadrature";
    }
    return "unknown";
}

SinrModel model_for(const SystemConfig& config, const LargeScaleFading& fading,
                    const CharacteristicExpansion& expansion, int user, int cell) {
    config.validate();
    fading.check_compatible(config);
    if (cell < 0 || cell >= config.num_cells) {
        throw std::out_of_range("cell index out of range");
    }
    InterferenceProfile profile;
    profile.home_cell = cell;
    for (const auto& t : expansion.terms) {
        if (t.order == 1) {
            profile.mu.push_back(t.mu);
            profile.tau.push_back(1);
        } else {
            if (profile.mu.empty() || profile.mu.back() != t.mu || profile.tau.back() != t.order - 1) {
                throw std::invalid_argument("expansion terms must list orders 1..tau for each eigenvalue");
            }
            profile.tau.back() = t.order;
        }
    }
    for (std::size_t m = 0; m < profile.mu.size(); ++m) {
        profile.diagonal.insert(profile.diagonal.end(), static_cast<std::size_t>(profile.tau[m]), profile.mu[m]);
    }
    if (profile.size() != config.users_per_cell * (config.num_cells - 1)) {
        throw std::invalid_argument("expansion does not cover K(L-1) interfering users");
    }
    return make_sinr_model(config, fading, profile, expansion, user);
}

RateResult rate_quadrature(const SinrModel& model) {
    const double pu = model.p_u;
    const double beta = model.desired.scale;
    const int nx = model.desired.shape;
    auto f = [&](double s) {
        const double gain = -std::expm1(-nx * std::log1p(pu * beta * s));
        return std::exp(log_mgf_z(model.interference.profile, pu * s) - s) * gain / s;
    };
    const auto q = specfun::integrate_to_infinity(f, 0.0, 1.0, fallback_spec());
    return {static_cast<double>(kLog2e) * q.value, RateMethod::quadrature,
            q.converged ? Quality::fallback : Quality::degraded, 1.0};
}

RateResult rate_exact(const SinrModel& model, FormulaPath path) {
    const bool distinct = use_distinct(model, path);
    if (model.interference.empty()) {
        // Without interference the closed form has no terms; the integral is exact.
        RateResult r = rate_quadrature(model);
        r.method = RateMethod::quadrature;
        return r;
    }
    const Closed c = distinct ? rate_distinct_closed(model) : rate_general_closed(model);
    if (accepted(c.value)) {
        return {static_cast<double>(c.value.value),
                distinct ? RateMethod::exact_distinct : RateMethod::exact_general, Quality::clean,
                static_cast<double>(c.condition)};
    }
    RateResult r = rate_quadrature(model);
    r.condition = static_cast<double>(c.condition);
    return r;
}

RateResult rate_exact(const SystemConfig& config, const LargeScaleFading& fading,
                      const CharacteristicExpansion& expansion, int user, int cell, FormulaPath path) {
    return rate_exact(model_for(config, fading, expansion, user, cell), path);
}

RateResult rate_lower_bound(const SinrModel& model) {
    const long double pu = model.p_u;
    const long double beta = model.desired.scale;
    TrackedSum acc;
    for (const auto& t : model.interference.expansion.terms) {
        const long double e = specfun::erlang_log_moment(t.order, t.mu, pu);
        acc.add(Tracked::from_double(t.chi) * Tracked::approx(e, 64.0L * kLongEps * (t.order + 2)));
    }
    const Tracked log_interference = acc.result();
    Quality quality = Quality::clean;
    long double ln_z = log_interference.value;
    if (!log_interference.finite() || log_interference.error > kGuardTolerance) {
        const auto q = log_interference_quadrature(model);
        ln_z = q.value;
        quality = q.converged ? Quality::fallback : Quality::degraded;
    }
    const long double exponent = specfun::digamma_int(model.desired.shape) - ln_z;
    const double value = static_cast<double>(std::log2(1.0L + pu * beta * std::exp(exponent)));
    return {value, RateMethod::lower_bound, quality, static_cast<double>(acc.condition())};
}

RateResult rate_lower_bound(const SystemConfig& config, const LargeScaleFading& fading,
                            const CharacteristicExpansion& expansion, int user, int cell) {
    return rate_lower_bound(model_for(config, fading, expansion, user, cell));
}

RateResult sum_rate(const SystemConfig& config, const LargeScaleFading& fading, int cell, FormulaPath path) {
    const InterferenceProfile profile = build_profile(config, fading, cell);
    const CharacteristicExpansion expansion =
        profile.empty() ? CharacteristicExpansion{} : characteristic_coefficients(profile);
    // Users with equal direct gain are exchangeable; evaluate each gain once.
    std::map<double, RateResult> cache;
    RateResult total{0.0, RateMethod::exact_general, Quality::clean, 1.0};
    bool first = true;
    for (int k = 0; k < config.users_per_cell; ++k) {
        const double g = fading(cell, cell, k);
        auto it = cache.find(g);
        if (it == cache.end()) {
            it = cache.emplace(g, rate_exact(make_sinr_model(config, fading, profile, expansion, k), path)).first;
        }
        const RateResult& r = it->second;
        total.value += r.value;
        total.quality = worst(total.quality, r.quality);
        total.condition = std::max(total.condition, r.condition);
        if (first || r.method == RateMethod::quadrature) {
            total.method = r.method;
        }
        first = false;
    }
    return total;
}

Evaluation ser_exact(const SinrModel& model, const ModulationScheme& modulation,
                     const specfun::QuadratureSpec& integration) {
    return ser_integral([&](double s) { return mgf_sinr(model, s); }, modulation, integration);
}

Evaluation ser_exact(const SystemConfig& config, const LargeScaleFading& fading,
                     const CharacteristicExpansion& expansion, const ModulationScheme& modulation, int user,
                     int cell, const specfun::QuadratureSpec& integration) {
    return ser_exact(model_for(config, fading, expansion, user, cell), modulation, integration);
}

Evaluation ser_high_snr(const SinrModel& model, const ModulationScheme& modulation,
                        const specfun::QuadratureSpec& integration) {
    return ser_integral([&](double s) { return mgf_sinr_high_snr(model, s); }, modulation, integration);
}

Evaluation ser_high_snr(const SystemConfig& config, const LargeScaleFading& fading,
                        const CharacteristicExpansion& expansion, const ModulationScheme& modulation, int user,
                        int cell) {
    return ser_high_snr(model_for(config, fading, expansion, user, cell), modulation);
}

Evaluation ser_approx(const SinrModel& model, const ModulationScheme& modulation) {
    const double g = modulation.g_mpsk;
    const double theta = modulation.theta_max;
    const double sn = std::sin(theta);
    const double w = theta / (2.0 * std::numbers::pi);
    const Evaluation m1 = mgf_sinr(model, g);
    const Evaluation m2 = mgf_sinr(model, 4.0 * g / 3.0);
    const Evaluation m3 = mgf_sinr(model, g / (sn * sn));
    const double v = (w - 1.0 / 6.0) * m1.value + 0.25 * m2.value + (w - 0.25) * m3.value;
    return {v, worst(worst(m1.quality, m2.quality), m3.quality),
            std::max({m1.condition, m2.condition, m3.condition})};
}

Evaluation ser_approx(const SystemConfig& config, const LargeScaleFading& fading,
                      const CharacteristicExpansion& expansion, const ModulationScheme& modulation, int user,
                      int cell) {
    return ser_approx(model_for(config, fading, expansion, user, cell), modulation);
}

Evaluation outage_quadrature(const SinrModel& model, double gamma_th) {
    if (!(gamma_th > 0.0)) {
        throw std::domain_error("outage: gamma_th must be positive");
    }
    return outage_quadrature_impl(model, gamma_th, 1.0 / model.p_u);
}

Evaluation outage_exact(const SinrModel& model, double gamma_th, FormulaPath path) {
    if (!(gamma_th > 0.0)) {
        throw std::domain_error("outage: gamma_th must be positive");
    }
    if (model.interference.empty()) {
        return {cdf_x(model.desired, gamma_th / model.p_u), Quality::clean, 1.0};
    }
    const int nk = model.desired.shape - 1;
    const long double pu = model.p_u;
    const long double y = gamma_th / model.desired.scale;
    TrackedSum acc;
    if (use_distinct(model, path)) {
        for (const auto& t : model.interference.expansion.terms) {
            if (t.order != 1) {
                throw std::invalid_argument("outage_exact: distinct path needs simple eigenvalues");
            }
            const long double mu = t.mu;
            const long double d = 1.0L / mu + y;
            TrackedSum inner;
            for (int p = 0; p <= nk; ++p) {
                for (int q = 0; q <= p; ++q) {
                    const Tracked v = tracked_pow(y, p) * tracked_pow(pu, q - p) * tracked_pow(d, -(q + 1)) *
                                      (1.0L / factorial(p - q));
                    inner.add(v);
                }
            }
            acc.add(Tracked::from_double(t.chi) * inner.result() / mu);
        }
    } else {
        // Terms regrouped as (1 + mu y)^-n C(n+q-1, q) (y / D)^q (y / p_u)^r / r!, r = p - q.
        std::vector<long double> partial_exp(static_cast<std::size_t>(nk) + 1);
        long double term = 1.0L;
        long double run = 0.0L;
        for (int r = 0; r <= nk; ++r) {
            run += term;
            partial_exp[static_cast<std::size_t>(r)] = run;
            term *= (y / pu) / (r + 1);
        }
        for (const auto& t : model.interference.expansion.terms) {
            const long double mu = t.mu;
            const long double d = 1.0L / mu + y;
            const long double ratio = y / d;
            TrackedSum inner;
            long double aq = 1.0L;
            for (int q = 0; q <= nk; ++q) {
                inner.add(Tracked::approx(aq * partial_exp[static_cast<std::size_t>(nk - q)],
                                          kLongEps * (4.0L * q + 8.0L + nk)));
                aq *= ratio * (t.order + q) / (q + 1);
            }
            acc.add(Tracked::from_double(t.chi) * tracked_pow(1.0L + mu * y, -t.order) * inner.result());
        }
    }
    const long double scale = std::exp(-y / pu);
    return settle_outage(acc.result(), scale, acc.condition(), model, gamma_th, 1.0 / model.p_u);
}

Evaluation outage_exact(const SystemConfig& config, const LargeScaleFading& fading,
                        const CharacteristicExpansion& expansion, int user, int cell, double gamma_th,
                        FormulaPath path) {
    return outage_exact(model_for(config, fading, expansion, user, cell), gamma_th, path);
}

Evaluation outage_small_threshold(const SinrModel& model, double gamma_th, FormulaPath path) {
    if (!(gamma_th > 0.0)) {
        throw std::domain_error("outage: gamma_th must be positive");
    }
    if (model.interference.empty()) {
        return {0.0, Quality::clean, 1.0};
    }
    const int nk = model.desired.shape - 1;
    const long double y = gamma_th / model.desired.scale;
    TrackedSum acc;
    const bool distinct = use_distinct(model, path);
    for (const auto& t : model.interference.expansion.terms) {
        if (distinct && t.order != 1) {
            throw std::invalid_argument("outage_small_threshold: distinct path needs simple eigenvalues");
        }
        const long double mu = t.mu;
        const long double d = 1.0L / mu + y;
        TrackedSum inner;
        if (distinct) {
            for (int p = 0; p <= nk; ++p) {
                inner.add(tracked_pow(y, p) * tracked_pow(d, -(1 + p)));
            }
            acc.add(Tracked::from_double(t.chi) * inner.result() / mu);
        } else {
            long double aq = 1.0L;
            for (int q = 0; q <= nk; ++q) {
                inner.add(Tracked::approx(aq, kLongEps * (4.0L * q + 4.0L)));
                aq *= (y / d) * (t.order + q) / (q + 1);
            }
            acc.add(Tracked::from_double(t.chi) * tracked_pow(1.0L + mu * y, -t.order) * inner.result());
        }
    }
    return settle_outage(acc.result(), 1.0L, acc.condition(), model, gamma_th, 0.0);
}

Evaluation outage_small_threshold(const SystemConfig& config, const LargeScaleFading& fading,
                                  const CharacteristicExpansion& expansion, int user, int cell, double gamma_th,
                                  FormulaPath path) {
    return outage_small_threshold(model_for(config, fading, expansion, user, cell), gamma_th, path);
}

}  // namespace mumimo
