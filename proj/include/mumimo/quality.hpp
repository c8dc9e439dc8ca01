// SPDX-License-Identifier: Apache-2.0
//
// Numerical-quality flags attached to closed-form evaluations.
//
//   clean     closed form accepted, tracked error within guard_tolerance
//   fallback  closed form rejected, quadrature path converged
//   degraded  quadrature path also missed its tolerance

#pragma once

#include <algorithm>

namespace mumimo {

// Largest tracked relative error a closed-form sum may carry.
inline constexpr double kGuardTolerance = 1e-9;

enum class Quality { clean = 0, fallback = 1, degraded = 2 };

inline Quality worst(Quality a, Quality b) { return std::max(a, b); }

inline const char* to_string(Quality q) {
    switch (q) {
        case Quality::clean:
            return "clean";
        case Quality::fallback:
            return "fallback";
        case Quality::degraded:
            return "degraded";
    }
    return "unknown";
}

struct Evaluation {
    double value = 0.0;
    Quality quality = Quality::clean;
    double condition = 1.0;  // sum|terms| / |sum| of the closed form, when one was attempted
};

}  // namespace mumimo
