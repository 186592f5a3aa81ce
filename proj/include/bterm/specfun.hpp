#pragma once

#include <cstdint>

#include "bterm/errors.hpp"

namespace bterm::specfun {

// Accuracy contract for the special-function evaluators: every value returned
// carries a truncation/rounding bound no larger than
// max(rel_tol*|value|, abs_tol); if that cannot be certified the evaluator
// throws precision_error instead of returning a guess.
struct AccuracyBudget {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  std::int64_t max_terms = 1'000'000;

  void validate() const;
};

const AccuracyBudget& default_budget();

// Modified Bessel function of the second kind, order 0 and 1.
// Power series with logarithm up to x = 2, Chebyshev fit of exp(x)*sqrt(x)*K
// on (2, 16], large-x asymptotic expansion beyond.
double bessel_k0(double x, const AccuracyBudget& budget = default_budget());
double bessel_k1(double x, const AccuracyBudget& budget = default_budget());

// Exponentially scaled variants exp(x)*K0(x), exp(x)*K1(x); same method
// selection, no underflow for large x.
double bessel_k0_scaled(double x, const AccuracyBudget& budget = default_budget());
double bessel_k1_scaled(double x, const AccuracyBudget& budget = default_budget());

// The fourth-log-derivative kernel
//   K(x) = (16x^5 + 288x^3 + 16x) K0(x) - (128x^4 + 64x^2) K1(x),
// i.e. (x d/dx)^4 [t K0(t)] read off at t = x.  Decays like x^{4.5} e^{-x}.
double kernel_K(double x, const AccuracyBudget& budget = default_budget());

// Companion kernel from the inverted-argument side:
//   K1c(x) = (16x^4 + 64x^2) K0(x) - 64x^3 K1(x),
// the value of (x d/dx)^4 [K0(A x^{-2})] at A x^{-2} = x.
double kernel_K1c(double x, const AccuracyBudget& budget = default_budget());

// Upper envelopes sqrt(pi/2t) e^{-t} (1 + c/(8t)) for K0 (c=1) and K1 (c=3),
// and the induced majorants for the two kernels; valid for t >= 1.
double bessel_k0_envelope(double t);
double bessel_k1_envelope(double t);
double kernel_K_envelope(double t);
double kernel_K1c_envelope(double t);

// Classical theta function  theta(x) = sum_{k in Z} e^{-pi k^2 x}, x > 0.
// Truncated when the tail bound 2 e^{-pi K^2 x} / (1 - e^{-pi x}) drops
// below the absolute floor.
double theta(double x, const AccuracyBudget& budget = default_budget());

// Central value of the completed real-analytic Eisenstein series on the
// imaginary axis:
//   E(y) = sqrt(y) log y + (gamma - log 4pi) sqrt(y)
//          + 4 sqrt(y) sum_{N>=1} sigma0(N) K0(2 pi N y),
// with the Fourier tail cut by the K0 envelope bound.  Satisfies
// E(y) = E(1/y).
double eisenstein_E(double y, const AccuracyBudget& budget = default_budget());

namespace detail {
// Test hook: overrides the Euler constant used by the K0/K1 power series.
// Used by the verification battery to exercise fault reporting; never set in
// normal operation.
void set_euler_gamma_for_testing(double value);
void reset_euler_gamma_for_testing();
}  // namespace detail

}  // namespace bterm::specfun
