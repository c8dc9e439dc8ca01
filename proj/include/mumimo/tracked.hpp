// SPDX-License-Identifier: Apache-2.0
//
// Extended-precision values that carry a first-order absolute error bound.
// Used by the alternating-sum formulas to decide when cancellation has eaten
// the result and a quadrature path must take over.

#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>

namespace mumimo {

inline constexpr long double kLongEps = std::numeric_limits<long double>::epsilon();
inline constexpr long double kDoubleEps = std::numeric_limits<double>::epsilon();

struct Tracked {
    long double value = 0.0L;
    long double error = 0.0L;  // absolute

    static Tracked exact(long double v) { return {v, 0.0L}; }

    // A value computed by a double-precision kernel good to `ulps` units.
    static Tracked from_double(long double v, long double ulps = 4.0L) {
        return {v, std::fabs(v) * ulps * kDoubleEps};
    }

    // A value known to `rel` relative accuracy.
    static Tracked approx(long double v, long double rel) { return {v, std::fabs(v) * rel}; }

    long double relative_error() const {
        if (value == 0.0L) {
            return error == 0.0L ? 0.0L : std::numeric_limits<long double>::infinity();
        }
        return error / std::fabs(value);
    }

    bool finite() const { return std::isfinite(value) && std::isfinite(error); }
};

inline Tracked operator+(Tracked a, Tracked b) {
    const long double v = a.value + b.value;
    return {v, a.error + b.error + kLongEps * std::fabs(v)};
}

inline Tracked operator-(Tracked a, Tracked b) {
    const long double v = a.value - b.value;
    return {v, a.error + b.error + kLongEps * std::fabs(v)};
}

inline Tracked operator-(Tracked a) { return {-a.value, a.error}; }

inline Tracked operator*(Tracked a, Tracked b) {
    const long double v = a.value * b.value;
    return {v, std::fabs(a.value) * b.error + std::fabs(b.value) * a.error + a.error * b.error +
                   kLongEps * std::fabs(v)};
}

inline Tracked operator*(Tracked a, long double c) {
    const long double v = a.value * c;
    return {v, a.error * std::fabs(c) + kLongEps * std::fabs(v)};
}

inline Tracked operator*(long double c, Tracked a) { return a * c; }

inline Tracked operator/(Tracked a, long double c) {
    const long double v = a.value / c;
    return {v, a.error / std::fabs(c) + kLongEps * std::fabs(v)};
}

inline Tracked& operator+=(Tracked& a, Tracked b) { return a = a + b; }

inline Tracked tracked_exp(long double arg) {
    const long double v = std::exp(arg);
    return {v, v * kLongEps * (2.0L + std::fabs(arg))};
}

inline Tracked tracked_pow(long double base, int exponent) {
    const long double v = std::pow(base, static_cast<long double>(exponent));
    return {v, std::fabs(v) * kLongEps * (2.0L + std::abs(exponent))};
}

// Neumaier-compensated accumulator. `condition()` is sum|x_i| / |sum x_i|.
class TrackedSum {
public:
    void add(Tracked t) {
        const long double x = t.value;
        const long double s = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            compensation_ += (sum_ - s) + x;
        } else {
            compensation_ += (x - s) + sum_;
        }
        sum_ = s;
        magnitude_ += std::fabs(x);
        error_ += t.error;
    }

    void add(long double x) { add(Tracked::exact(x)); }

    Tracked result() const {
        const long double v = sum_ + compensation_;
        return {v, error_ + 2.0L * kLongEps * std::fabs(v) + kLongEps * kLongEps * magnitude_};
    }

    long double magnitude() const { return magnitude_; }

    long double condition() const {
        const long double v = std::fabs(sum_ + compensation_);
        if (v == 0.0L) {
            return magnitude_ == 0.0L ? 1.0L : std::numeric_limits<long double>::infinity();
        }
        return magnitude_ / v;
    }

private:
    long double sum_ = 0.0L;
    long double compensation_ = 0.0L;
    long double magnitude_ = 0.0L;
    long double error_ = 0.0L;
};

}  // namespace mumimo
