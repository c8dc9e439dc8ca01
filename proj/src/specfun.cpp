// SPDX-License-Identifier: Apache-2.0

#include "mumimo/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mumimo::specfun {
namespace {

constexpr long double kEulerGamma = std::numbers::egamma_v<long double>;
constexpr int kMaxIterations = 100000;
// Accuracy credited to a single long-double special-function kernel value.
constexpr long double kKernelRel = 64.0L * kLongEps;

QuadratureSpec fallback_spec() {
    QuadratureSpec spec;
    spec.relative_tolerance = 1e-12;
    spec.max_subdivisions = 4000;
    return spec;
}

[[noreturn]] void domain(const std::string& what) { throw std::domain_error(what); }

// e^x E_n(x) for n >= 1, x > 0.
long double en_scaled_positive(int n, long double x) {
    const int nm1 = n - 1;
    if (x > 1.0L) {
        // Modified Lentz evaluation of the continued fraction.
        const long double tiny = std::numeric_limits<long double>::min() * 1e10L;
        long double b = x + n;
        long double c = 1.0L / tiny;
        long double d = 1.0L / b;
        long double h = d;
        for (int i = 1; i <= kMaxIterations; ++i) {
            const long double an = -static_cast<long double>(i) * (nm1 + i);
            b += 2.0L;
            d = 1.0L / (an * d + b);
            c = b + an / c;
            const long double del = c * d;
            h *= del;
            if (std::fabs(del - 1.0L) <= kLongEps) {
                return h;
            }
        }
        throw std::runtime_error("expint_en: continued fraction did not converge");
    }
    long double ans = nm1 != 0 ? 1.0L / nm1 : -std::log(x) - kEulerGamma;
    long double fact = 1.0L;
    for (int i = 1; i <= kMaxIterations; ++i) {
        fact *= -x / i;
        long double del;
        if (i != nm1) {
            del = -fact / (i - nm1);
        } else {
            long double psi = -kEulerGamma;
            for (int ii = 1; ii <= nm1; ++ii) {
                psi += 1.0L / ii;
            }
            del = fact * (-std::log(x) + psi);
        }
        ans += del;
        if (std::fabs(del) < std::fabs(ans) * kLongEps) {
            return ans * std::exp(x);
        }
    }
    throw std::runtime_error("expint_en: series did not converge");
}

bool acceptable(const Tracked& t) {
    return t.finite() && t.relative_error() <= kClosedFormTolerance;
}

}  // namespace

long double factorial(int n) {
    static const auto table = [] {
        std::array<long double, 1755> t{};
        t[0] = 1.0L;
        for (std::size_t i = 1; i < t.size(); ++i) {
            t[i] = t[i - 1] * static_cast<long double>(i);
        }
        return t;
    }();
    if (n < 0) {
        domain("factorial of negative integer");
    }
    if (static_cast<std::size_t>(n) >= table.size()) {
        return std::numeric_limits<long double>::infinity();
    }
    return table[static_cast<std::size_t>(n)];
}

long double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0L;
    }
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    }
    return r;
}

long double expint_ei_ld(long double x) {
    if (!(x < 0.0L)) {
        domain("expint_ei: argument must be negative");
    }
    const long double t = -x;
    if (t > 1.0L) {
        return -en_scaled_positive(1, t) * std::exp(-t);
    }
    long double sum = 0.0L;
    long double term = 1.0L;
    for (int k = 1; k <= kMaxIterations; ++k) {
        term *= x / k;
        const long double del = term / k;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kLongEps) {
            break;
        }
    }
    return kEulerGamma + std::log(t) + sum;
}

double expint_ei(double x) { return static_cast<double>(expint_ei_ld(x)); }

long double expint_en_scaled(int n, long double z) {
    if (!(z > 0.0L)) {
        domain("expint_en: argument must be positive");
    }
    if (n >= 1) {
        return en_scaled_positive(n, z);
    }
    // E_{-m}(z) = m! e^{-z} / z^{m+1} sum_{i<=m} z^i / i!
    const int m = -n;
    long double sum = 0.0L;
    long double term = 1.0L;
    for (int i = 0; i <= m; ++i) {
        sum += term;
        term *= z / (i + 1);
    }
    return factorial(m) * sum / std::pow(z, static_cast<long double>(m + 1));
}

double expint_en(int n, double z) {
    if (n < 0) {
        domain("expint_en: order must be non-negative");
    }
    if (!(z > 0.0)) {
        domain("expint_en: argument must be positive");
    }
    return static_cast<double>(expint_en_scaled(n, z) * std::exp(-static_cast<long double>(z)));
}

std::vector<long double> expint_en_scaled_sequence(int n_max, long double z) {
    if (n_max < 1) {
        domain("expint_en_scaled_sequence: n_max must be >= 1");
    }
    if (!(z > 0.0L)) {
        domain("expint_en_scaled_sequence: argument must be positive");
    }
    std::vector<long double> s(static_cast<std::size_t>(n_max));
    const long double zf = std::floor(z);
    const int k0 = zf >= n_max ? n_max : std::max(1, static_cast<int>(zf));
    s[k0 - 1] = en_scaled_positive(k0, z);
    for (int k = k0; k < n_max; ++k) {
        s[k] = (1.0L - z * s[k - 1]) / k;
    }
    for (int k = k0 - 1; k >= 1; --k) {
        s[k - 1] = (1.0L - k * s[k]) / z;
    }
    return s;
}

Tracked upper_gamma_scaled_tracked(int a, long double x) {
    if (a < 1) {
        domain("upper_gamma: a must be >= 1");
    }
    if (x < 0.0L) {
        domain("upper_gamma: x must be non-negative");
    }
    long double sum = 0.0L;
    long double term = 1.0L;
    for (int j = 0; j < a; ++j) {
        sum += term;
        term *= x / (j + 1);
    }
    return {sum, sum * kLongEps * (2.0L * a + 2.0L)};
}

double upper_gamma(int a, double x) {
    const Tracked s = upper_gamma_scaled_tracked(a, x);
    return static_cast<double>(factorial(a - 1) * std::exp(-static_cast<long double>(x)) * s.value);
}

double digamma_int(int n) {
    if (n < 1) {
        domain("digamma_int: n must be >= 1");
    }
    long double sum = 0.0L;
    for (int k = n - 1; k >= 1; --k) {
        sum += 1.0L / k;
    }
    return static_cast<double>(sum - kEulerGamma);
}

Tracked tricomi_u_tracked(int a, int b, long double z) {
    if (a < 1) {
        domain("tricomi_u: a must be >= 1");
    }
    if (!(z > 0.0L)) {
        domain("tricomi_u: z must be positive");
    }
    const int c = b - a - 1;
    if (c >= 0) {
        // (1+t)^c expands into a positive finite sum of gamma integrals.
        long double term = std::pow(z, -static_cast<long double>(a));
        long double sum = 0.0L;
        for (int j = 0; j <= c; ++j) {
            sum += term;
            term = term * static_cast<long double>(c - j) / (j + 1) * (a + j) / z;
        }
        return {sum, sum * kLongEps * (4.0L * (c + a) + 4.0L)};
    }
    // t^(a-1) = ((1+t) - 1)^(a-1) turns the integral into scaled E_k terms.
    const int d = -c;
    TrackedSum acc;
    for (int j = 0; j <= a - 1; ++j) {
        const long double sign = ((a - 1 - j) % 2 == 0) ? 1.0L : -1.0L;
        const long double term = sign * binomial(a - 1, j) * expint_en_scaled(d - j, z);
        acc.add(Tracked::approx(term, kKernelRel));
    }
    return acc.result() / factorial(a - 1);
}

QuadratureResult tricomi_u_quadrature(int a, int b, double z, const QuadratureSpec& spec) {
    if (a < 1) {
        domain("tricomi_u: a must be >= 1");
    }
    if (!(z > 0.0)) {
        domain("tricomi_u: z must be positive");
    }
    const double lg = std::lgamma(static_cast<double>(a));
    const double c = static_cast<double>(b - a - 1);
    auto f = [=](double t) {
        const double power = a == 1 ? 0.0 : (a - 1) * std::log(t);
        return std::exp(power - z * t + c * std::log1p(t) - lg);
    };
    return integrate_to_infinity(f, 0.0, std::max(1.0, static_cast<double>(a)) / z, spec);
}

double tricomi_u(int a, int b, double z) {
    const Tracked t = tricomi_u_tracked(a, b, z);
    if (acceptable(t)) {
        return static_cast<double>(t.value);
    }
    return tricomi_u_quadrature(a, b, z, fallback_spec()).value;
}

Tracked hyp2f0_neg_tracked(int n, int p, long double x) {
    if (n < 1) {
        domain("hyp2f0_neg: n must be >= 1");
    }
    if (p < 0) {
        domain("hyp2f0_neg: p must be >= 0");
    }
    if (!(x > 0.0L)) {
        domain("hyp2f0_neg: x must be positive");
    }
    if (p == 0) {
        return Tracked::exact(1.0L);
    }
    const int s = std::min(n, p);
    const int l = std::max(n, p);
    const long double z = 1.0L / x;
    // z^s U(s, s-l+1, z) with U written through e^z E_k(z).
    const std::vector<long double> scaled = expint_en_scaled_sequence(l, z);
    TrackedSum acc;
    for (int j = 0; j <= s - 1; ++j) {
        const long double sign = ((s - 1 - j) % 2 == 0) ? 1.0L : -1.0L;
        const long double term = sign * binomial(s - 1, j) * scaled[static_cast<std::size_t>(l - j - 1)];
        acc.add(Tracked::approx(term, kKernelRel));
    }
    return acc.result() * tracked_pow(z, s) / factorial(s - 1);
}

QuadratureResult hyp2f0_neg_quadrature(int n, int p, double x, const QuadratureSpec& spec) {
    if (n < 1 || p < 0) {
        domain("hyp2f0_neg: n must be >= 1 and p >= 0");
    }
    if (!(x > 0.0)) {
        domain("hyp2f0_neg: x must be positive");
    }
    if (p == 0) {
        return {1.0, 0.0, 0, true};
    }
    const int s = std::min(n, p);
    const int l = std::max(n, p);
    const double lg = std::lgamma(static_cast<double>(s));
    auto f = [=](double t) {
        const double power = s == 1 ? 0.0 : (s - 1) * std::log(t);
        return std::exp(power - t - l * std::log1p(x * t) - lg);
    };
    return integrate_to_infinity(f, 0.0, static_cast<double>(s), spec);
}

double hyp2f0_neg(int n, int p, double x) {
    const Tracked t = hyp2f0_neg_tracked(n, p, x);
    if (acceptable(t)) {
        return static_cast<double>(t.value);
    }
    return hyp2f0_neg_quadrature(n, p, x, fallback_spec()).value;
}

long double erlang_log_moment(int n, long double scale, long double a) {
    if (n < 1) {
        domain("erlang_log_moment: shape must be >= 1");
    }
    if (!(scale > 0.0L) || a < 0.0L) {
        domain("erlang_log_moment: scale must be positive and a non-negative");
    }
    if (a == 0.0L) {
        return 0.0L;
    }
    const std::vector<long double> s = expint_en_scaled_sequence(n, 1.0L / (a * scale));
    long double sum = 0.0L;
    for (long double v : s) {
        sum += v;
    }
    return sum;
}

QuadratureResult log_moment_kernel_quadrature(int n, double mu, double a, const QuadratureSpec& spec) {
    if (n < 1 || !(mu > 0.0) || a < 0.0) {
        domain("log_moment_kernel: requires n >= 1, mu > 0, a >= 0");
    }
    auto f = [=](double z) {
        const double power = n == 1 ? 0.0 : (n - 1) * std::log(z);
        return std::log1p(a * z) * std::exp(power - z / mu);
    };
    return integrate_to_infinity(f, 0.0, mu * n, spec);
}

double log_moment_kernel(int n, double mu, double a) {
    if (n < 1 || !(mu > 0.0) || a < 0.0) {
        domain("log_moment_kernel: requires n >= 1, mu > 0, a >= 0");
    }
    if (a == 0.0) {
        return 0.0;
    }
    const long double ln_norm = std::lgamma(static_cast<long double>(n)) + n * std::log(static_cast<long double>(mu));
    const long double v = std::exp(ln_norm) * erlang_log_moment(n, mu, a);
    if (std::isfinite(static_cast<double>(v))) {
        return static_cast<double>(v);
    }
    return log_moment_kernel_quadrature(n, mu, a, fallback_spec()).value;
}

std::vector<Tracked> lemma1_j_sequence(long double b, long double mu, int p_max) {
    if (!(b > 0.0L) || !(mu > 0.0L) || p_max < 0) {
        domain("lemma1_j_sequence: requires b > 0, mu > 0, p_max >= 0");
    }
    const long double s = mu + 1.0L;
    const Tracked ei_lo = Tracked::approx(expint_ei_ld(-b), kKernelRel);
    const Tracked ei_hi = Tracked::approx(expint_ei_ld(-s * b), kKernelRel);
    const Tracked e_mu = tracked_exp(-b * mu);
    const Tracked e_s = tracked_exp(-b * s);
    std::vector<Tracked> J(static_cast<std::size_t>(p_max) + 1);
    J[0] = (e_mu * ei_lo - ei_hi) / mu;
    for (int p = 1; p <= p_max; ++p) {
        // int_b^inf z^(p-1) e^(-s z) dz = (p-1)! / s^p * e^(-s b) sum_{j<p} (s b)^j / j!
        const Tracked tail =
            upper_gamma_scaled_tracked(p, b * s) * (factorial(p - 1) / std::pow(s, static_cast<long double>(p)));
        const Tracked K = (e_mu * tracked_pow(b, p) * ei_lo + e_s * tail) / mu;
        J[static_cast<std::size_t>(p)] = K + J[static_cast<std::size_t>(p) - 1] * (static_cast<long double>(p) / mu);
    }
    return J;
}

Tracked lemma1_kernel_tracked(int m, int n, long double a, long double b, long double alpha) {
    if (m < 0 || n < 0) {
        domain("lemma1_kernel: m and n must be non-negative");
    }
    if (!(a > 0.0L) || !(b > 0.0L) || !(alpha > 0.0L)) {
        domain("lemma1_kernel: a, b and alpha must be positive");
    }
    const std::vector<Tracked> J = lemma1_j_sequence(b, alpha / a, n + m);
    TrackedSum acc;
    for (int i = 0; i <= m; ++i) {
        const Tracked coeff = tracked_pow(-b, m - i) * binomial(m, i);
        acc.add(coeff * J[static_cast<std::size_t>(n + i)]);
    }
    return acc.result() * tracked_exp(alpha * b / a) / std::pow(a, static_cast<long double>(m + 1));
}

QuadratureResult lemma1_kernel_quadrature(int m, int n, double a, double b, double alpha,
                                          const QuadratureSpec& spec) {
    if (m < 0 || n < 0) {
        domain("lemma1_kernel: m and n must be non-negative");
    }
    if (!(a > 0.0) || !(b > 0.0) || !(alpha > 0.0)) {
        domain("lemma1_kernel: a, b and alpha must be positive");
    }
    auto f = [=](double x) {
        const long double y = static_cast<long double>(a) * x + b;
        const long double power = (m == 0 ? 0.0L : m * std::log(static_cast<long double>(x))) + n * std::log(y);
        return static_cast<double>(-std::exp(power - alpha * x - y) * en_scaled_positive(1, y));
    };
    const double scale = std::max(1.0, static_cast<double>(m + n)) / (alpha + a);
    return integrate_to_infinity(f, 0.0, scale, spec);
}

double lemma1_kernel(int m, int n, double a, double b, double alpha) {
    const Tracked t = lemma1_kernel_tracked(m, n, a, b, alpha);
    if (acceptable(t)) {
        return static_cast<double>(t.value);
    }
    return lemma1_kernel_quadrature(m, n, a, b, alpha, fallback_spec()).value;
}

}  // namespace mumimo::specfun
