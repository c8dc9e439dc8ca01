// SPDX-License-Identifier: Apache-2.0
//
// Special functions used by the rate, SER and outage expressions.
//
// Each closed form has a `_tracked` variant evaluated in long double that
// carries a running error bound. The plain double entry points check that
// bound and switch to adaptive quadrature of the defining integral when the
// closed form has lost too many digits.

#pragma once

#include <vector>

#include "mumimo/quadrature.hpp"
#include "mumimo/tracked.hpp"

namespace mumimo::specfun {

// Relative error above which a double entry point abandons its closed form.
inline constexpr long double kClosedFormTolerance = 1e-10L;

// n! (infinite beyond the long double range) and binomial coefficients.
long double factorial(int n);
long double binomial(int n, int k);

// Ei(x) for x < 0.
double expint_ei(double x);
long double expint_ei_ld(long double x);

// E_n(z) = int_1^inf t^-n e^-zt dt, n >= 0, z > 0.
double expint_en(int n, double z);

// e^z E_n(z). Negative n is accepted and uses the finite-sum form.
long double expint_en_scaled(int n, long double z);

// e^z E_k(z) for k = 1..n_max, computed with the stable direction of the
// three-term recurrence on each side of k ~ z. out[k-1] holds order k.
std::vector<long double> expint_en_scaled_sequence(int n_max, long double z);

// Gamma(a, x) for integer a >= 1.
double upper_gamma(int a, double x);

// e^x Gamma(a, x) / (a-1)! = sum_{j<a} x^j / j!.
Tracked upper_gamma_scaled_tracked(int a, long double x);

// psi(n) for integer n >= 1.
double digamma_int(int n);

// Tricomi U(a, b, z) for integer a >= 1, integer b, z > 0.
double tricomi_u(int a, int b, double z);
Tracked tricomi_u_tracked(int a, int b, long double z);
QuadratureResult tricomi_u_quadrature(int a, int b, double z, const QuadratureSpec& spec = {});

// 2F0(n, p; ; -x) for n >= 1, p >= 0, x > 0.
double hyp2f0_neg(int n, int p, double x);
Tracked hyp2f0_neg_tracked(int n, int p, long double x);
QuadratureResult hyp2f0_neg_quadrature(int n, int p, double x, const QuadratureSpec& spec = {});

// int_0^inf ln(1 + a z) z^(n-1) e^(-z/mu) dz.
double log_moment_kernel(int n, double mu, double a);
QuadratureResult log_moment_kernel_quadrature(int n, double mu, double a,
                                              const QuadratureSpec& spec = {});

// E[ln(1 + a X)] for X ~ Erlang(n, scale). Every term of the underlying sum
// is positive, so no cancellation guard is needed.
long double erlang_log_moment(int n, long double scale, long double a);

// J_p(b, mu) = int_b^inf z^p e^(-mu z) Ei(-z) dz for p = 0..p_max, by the
// upward recurrence J_p = K_p + (p / mu) J_{p-1}. The recurrence amplifies
// errors by roughly ((mu + 1) / mu)^p; the tracked bounds reflect that.
std::vector<Tracked> lemma1_j_sequence(long double b, long double mu, int p_max);

// I_{m,n}(a, b, alpha) = int_0^inf x^m (a x + b)^n e^(-alpha x) Ei(-(a x + b)) dx.
double lemma1_kernel(int m, int n, double a, double b, double alpha);
Tracked lemma1_kernel_tracked(int m, int n, long double a, long double b, long double alpha);
QuadratureResult lemma1_kernel_quadrature(int m, int n, double a, double b, double alpha,
                                          const QuadratureSpec& spec = {});

}  // namespace mumimo::specfun
