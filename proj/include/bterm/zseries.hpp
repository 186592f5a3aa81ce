#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bterm/dirichlet.hpp"
#include "bterm/specfun.hpp"

namespace bterm::zseries {

// Selects which boundary-term family is evaluated: sign epsilon in the
// functional equation, Mellin scale n, and the pole orders of the
// coefficient series and of gamma at s = 1.  The elliptic-curve case is
// (+1, 2, 2, 2); the classical theta toy case is (+1, 1, 1, 1).  Other
// combinations are accepted but flagged experimental.
struct ZSeriesSpec {
  int epsilon = 1;
  int n = 2;
  int lambda_c = 2;
  int lambda_gamma = 2;

  void validate() const;
  bool experimental() const;
  static ZSeriesSpec elliptic() { return {1, 2, 2, 2}; }
  static ZSeriesSpec toy() { return {1, 1, 1, 1}; }
};

// Error-bounded truncation of the kernel sum: cutoff T, validity scale R
// (sum is certified only for x >= sqrt(R/T)), and the exponent bookkeeping
// (alpha, beta, eps) fixing the tail exponent k = ceil(alpha*beta + 1).
struct TruncationPlan {
  double T = 0.0;
  double R = 20.0;
  double alpha = 0.5;
  double beta = 2.0;
  double eps = 0.1;

  void validate() const;
  int tail_exponent() const;        // smallest integer >= alpha*beta + 1
  double min_admissible_x() const;  // sqrt(R/T)
};

// kappa_gamma(x) = 4 sum_{N>=1} sigma0(N) K0(2 pi N x): the inverse Mellin
// transform of the squared completed zeta.  Tail cut by the K0 envelope.
double kappa_gamma(double x, const specfun::AccuracyBudget& budget = specfun::default_budget());

// Toy kernel 2 e^{-pi x^2} (inverse Mellin transform of pi^{-s/2} Gamma(s/2)).
double kappa_toy(double x);

// V(x, nu) = kappa_gamma(nu x^{-2}) - x^2 kappa_gamma(nu x^2).
double V(double x, double nu, const specfun::AccuracyBudget& budget = specfun::default_budget());

// Same value through the Eisenstein route:
//   x^2 log x^2 + x^2 log(Q nu) + log x^2 - log(Q nu)
//     + (x/sqrt(nu)) (E(nu x^{-2}) - E(nu x^2)),   Q = e^gamma / 4pi.
double V_eisenstein(double x, double nu,
                    const specfun::AccuracyBudget& budget = specfun::default_budget());

// Z(x, nu) = (x d/dx)^4 V(x, nu), summed termwise with the exact kernels
//   4 sigma0(N) [ K1c(2 pi N nu x^{-2}) - K(2 pi N nu x^2) / (2 pi N nu) ].
double Z_xnu(double x, double nu,
             const specfun::AccuracyBudget& budget = specfun::default_budget());

// Leading small-x terms 16 x^2 log x^2 + 16 x^2 log(Q e^4 nu); the caller
// compares against Z_xnu to study the remainder.
double Z_asym_small(double x, double nu);

// Dilation defect Z(x,nu) - (nu0/nu) Z(x sqrt(nu/nu0), nu0).
double dilation_residual(double x, double nu, double nu0,
                         const specfun::AccuracyBudget& budget = specfun::default_budget());

struct TruncatedValue {
  double value = 0.0;
  double bound = 0.0;      // certified tail majorant for the dropped n > T part
  double m_eps = 0.0;      // empirical coefficient bound max a(n)/n^eps
  int tail_exponent = 0;   // the k used in the majorant
};

// Truncated kernel sum
//   (2/pi) sum_{n<=T} (a(n)/n) K(2 pi n x^2)
// plus the explicit tail majorant
//   (2/pi) 312 sqrt(2 pi) (k+5)! (M_eps/(k-eps)) T^eps (x^2 T)^{-k}.
// Requires x >= sqrt(R/T) and a.limit >= T.
TruncatedValue Z_E0_truncated(const dirichlet::CoeffSeries& a_weights, double x,
                              const TruncationPlan& plan);

// Grid-friendly form with the coefficient scan cached.
class ZE0Evaluator {
 public:
  ZE0Evaluator(dirichlet::CoeffSeries a_weights, TruncationPlan plan);
  TruncatedValue operator()(double x) const;
  const TruncationPlan& plan() const { return plan_; }
  double m_eps() const { return m_eps_; }

 private:
  dirichlet::CoeffSeries a_;
  TruncationPlan plan_;
  double m_eps_ = 0.0;
};

struct ZEValue {
  double value = 0.0;  // -(truncated kernel sum): the boundary-term fourth derivative
  double bound = 0.0;  // truncation majorant (the small-x remainder O(x^A) is dropped)
  std::string note;    // records what was neglected
};

// Z_E(x) = -(2/pi) sum_{n<=T} (a(n)/n) K(2 pi n x^2) with a = a_weights(cE).
ZEValue Z_E(const ZE0Evaluator& eval, double x);

// ---------------------------------------------------------------------------
// Sign scans

struct SignScanPoint {
  double x = 0.0;
  double value = 0.0;
  double bound = 0.0;
  char sign = '?';  // '+', '-', '0' (exact zero with zero bound), '?' indeterminate
};

struct SignScanReport {
  std::vector<SignScanPoint> points;
  // Brackets between consecutive *certified* points of opposite sign.
  std::vector<std::pair<double, double>> sign_change_brackets;
  // Largest prefix (x_lo, prefix_end) on which every certified sign equals
  // the first certified sign; indeterminate points neither extend nor break it.
  char prefix_sign = '?';
  double prefix_end = 0.0;
  std::int64_t certified = 0;
  std::int64_t indeterminate = 0;
};

// Evaluates (value, bound) on a log-spaced grid and asserts a sign only where
// |value| > bound.
SignScanReport sign_scan(const std::function<std::pair<double, double>(double)>& eval,
                         double x_lo, double x_hi, int points, int threads = 1);

// ---------------------------------------------------------------------------
// Quadrature cross-checks of the boundary-term identities

// omega(s) = int_0^1 h(x) x^{s-n} dx/x, evaluated as int_0^infty
// h(e^{-t}) e^{-(s-n) t} dt (h grows at most polynomially in t).
double omega_quadrature(const std::function<double(double)>& h, double s,
                        const ZSeriesSpec& spec, double abs_tol = 1e-10);

// xi(s) = int_1^infty g(x) x^{s-1} dx for a rapidly decaying kernel sum g.
double xi_quadrature(const std::function<double(double)>& g, double s, double abs_tol = 1e-10);

// The toy-case building blocks: h(x) = (theta(x^{-2}) - 1) - x (theta(x^2) - 1)
// and g(x) = theta(x^2) - 1.
double toy_h(double x, const specfun::AccuracyBudget& budget = specfun::default_budget());
double toy_g(double x, const specfun::AccuracyBudget& budget = specfun::default_budget());

}  // namespace bterm::zseries
