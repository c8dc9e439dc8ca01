// SPDX-License-Identifier: Apache-2.0
//
// Globally adaptive Gauss-Kronrod (7/15) quadrature and fixed Gauss-Legendre
// rules. The semi-infinite variant maps [a, inf) onto [0, 1) through
// t = a + scale * u / (1 - u).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace mumimo::specfun {

struct QuadratureSpec {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-300;
    int max_subdivisions = 2000;

    void validate() const {
        if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) {
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        }
        if (max_subdivisions < 1) {
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
        }
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod15(const F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    double abs_sum = std::fabs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }
    const double result = kronrod * half;
    abs_sum *= std::fabs(half);
    asc *= std::fabs(half);
    double err = std::fabs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum;
    if (abs_sum > std::numeric_limits<double>::min() / roundoff) {
        err = std::max(err, roundoff);
    }
    return {lo, hi, result, err};
}

}  // namespace detail

template <class F>
QuadratureResult integrate(const F& f, double lo, double hi, const QuadratureSpec& spec = {}) {
    spec.validate();
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::kronrod15(f, lo, hi));
    double total = heap.top().value;
    double total_err = heap.top().error;
    int intervals = 1;
    auto done = [&] {
        return total_err <= std::max(spec.absolute_tolerance, spec.relative_tolerance * std::fabs(total));
    };
    while (!done() && intervals < spec.max_subdivisions) {
        const detail::Segment worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            break;  // interval cannot be split further in double precision
        }
        heap.pop();
        const detail::Segment left = detail::kronrod15(f, worst.lo, mid);
        const detail::Segment right = detail::kronrod15(f, mid, worst.hi);
        heap.push(left);
        heap.push(right);
        ++intervals;
        // Re-sum rather than update incrementally to keep the error bookkeeping exact.
        total = 0.0;
        total_err = 0.0;
        auto copy = heap;
        while (!copy.empty()) {
            total += copy.top().value;
            total_err += copy.top().error;
            copy.pop();
        }
    }
    return {total, total_err, intervals, done()};
}

// Integral over [lo, inf). `scale` sets where the mapping puts its resolution;
// pass the integrand's natural length scale.
template <class F>
QuadratureResult integrate_to_infinity(const F& f, double lo, double scale = 1.0,
                                       const QuadratureSpec& spec = {}) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("integrate_to_infinity: scale must be positive");
    }
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double t = lo + scale * u / one_minus;
        if (!std::isfinite(t)) {
            return 0.0;
        }
        const double v = f(t) * scale / (one_minus * one_minus);
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(mapped, 0.0, 1.0, spec);
}

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule via Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    }
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

template <class F>
double apply_rule(const GaussLegendreRule& rule, const F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(center + half * rule.nodes[i]);
    }
    return sum * half;
}

}  // namespace mumimo::specfun
