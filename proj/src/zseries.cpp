#include "bterm/zseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bterm/constants.hpp"
#include "bterm/errors.hpp"
#include "bterm/parallel.hpp"
#include "bterm/quadrature.hpp"

namespace bterm::zseries {

namespace {

using specfun::AccuracyBudget;

double sigma0_of(std::int64_t n) {
  double c = 0.0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) c += (d * d == n) ? 1.0 : 2.0;
  }
  return c;
}

// sum_{N>M} N^4 e^{-aN} <= (M+1)^4 e^{-a(M+1)} / (1 - e^{-(a - 4/(M+1))}),
// valid for a > 4/(M+1); (1 + j/(M+1))^4 <= e^{4j/(M+1)}.
double quartic_exp_tail(double a, double m1) {
  const double gap = a - 4.0 / m1;
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  const double lead = std::exp(4.0 * std::log(m1) - a * m1);
  return lead / (-std::expm1(-gap));
}

// Envelope constants: |K1c(t)| <= 178 sqrt(pi/2) t^{3.5} e^{-t} and
// |K(t)| <= 624 sqrt(pi/2) t^{4.5} e^{-t}, both for t >= 1.
constexpr double kP1 = 178.0;
constexpr double kP2 = 624.0;

}  // namespace

void ZSeriesSpec::validate() const {
  if ((epsilon != 1 && epsilon != -1) || n < 1 || lambda_c < 1 || lambda_gamma < 1) {
    throw std::invalid_argument("ZSeriesSpec: need epsilon in {+1,-1}, n >= 1, lambdas >= 1");
  }
}

bool ZSeriesSpec::experimental() const {
  const bool elliptic_like = epsilon == 1 && n == 2 && lambda_c == 2 && lambda_gamma == 2;
  const bool toy_like = epsilon == 1 && n == 1 && lambda_c == 1 && lambda_gamma == 1;
  return !(elliptic_like || toy_like);
}

void TruncationPlan::validate() const {
  if (!(T >= 1.0)) throw std::invalid_argument("TruncationPlan: T must be >= 1");
  if (!(R > 1.0)) throw std::invalid_argument("TruncationPlan: R must be > 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("TruncationPlan: alpha in (0,1)");
  if (!(beta > 1.0)) throw std::invalid_argument("TruncationPlan: beta > 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("TruncationPlan: eps in (0,1)");
  if (!(alpha * beta > eps)) throw std::invalid_argument("TruncationPlan: need alpha*beta > eps");
}

int TruncationPlan::tail_exponent() const {
  return static_cast<int>(std::ceil(alpha * beta + 1.0));
}

double TruncationPlan::min_admissible_x() const { return std::sqrt(R / T); }

double kappa_gamma(double x, const AccuracyBudget& budget) {
  if (!(x > 0.0)) throw std::domain_error("kappa_gamma: x must be positive");
  budget.validate();
  const double a = 2.0 * kPi * x;
  double sum = 0.0;
  for (std::int64_t n = 1;; ++n) {
    if (n > budget.max_terms) {
      throw precision_error("kappa_gamma: term cap exceeded at x = " + std::to_string(x));
    }
    const double t = a * static_cast<double>(n);
    if (t < 700.0) sum += sigma0_of(n) * specfun::bessel_k0(t, budget);
    if (t >= 1.0) {
      // sigma0(N) <= 2 sqrt(N) kills the sqrt(N) in the envelope; full tail:
      // 4 sum_{N>n} sigma0 K0 <= 8 sqrt(pi/2a)(1 + 1/(8a(n+1))) e^{-a(n+1)} / (1 - e^{-a}).
      const double tail = 8.0 * std::sqrt(kPi / (2.0 * a)) *
                          (1.0 + 1.0 / (8.0 * a * (n + 1))) * std::exp(-a * (n + 1)) /
                          (-std::expm1(-a));
      const double value = 4.0 * sum;
      if (tail < budget.abs_tol || tail < budget.rel_tol * std::abs(value)) {
        return value;
      }
    }
  }
}

double kappa_toy(double x) {
  if (x < 0.0) throw std::domain_error("kappa_toy: x must be nonnegative");
  return 2.0 * std::exp(-kPi * x * x);
}

double V(double x, double nu, const AccuracyBudget& budget) {
  if (!(x > 0.0) || !(nu > 0.0)) throw std::domain_error("V: x and nu must be positive");
  return kappa_gamma(nu / (x * x), budget) - x * x * kappa_gamma(nu * x * x, budget);
}

double V_eisenstein(double x, double nu, const AccuracyBudget& budget) {
  if (!(x > 0.0) || !(nu > 0.0)) throw std::domain_error("V_eisenstein: x and nu must be positive");
  const double log_q_nu = kEulerGamma - std::log(4.0 * kPi) + std::log(nu);
  const double x2 = x * x;
  return x2 * std::log(x2) + x2 * log_q_nu + std::log(x2) - log_q_nu +
         (x / std::sqrt(nu)) *
             (specfun::eisenstein_E(nu / x2, budget) - specfun::eisenstein_E(nu * x2, budget));
}

double Z_xnu(double x, double nu, const AccuracyBudget& budget) {
  if (!(x > 0.0) || !(nu > 0.0)) throw std::domain_error("Z_xnu: x and nu must be positive");
  budget.validate();
  const double x2 = x * x;
  const double b = 2.0 * kPi * nu / x2;  // inverted-argument side scale
  const double c = 2.0 * kPi * nu * x2;  // direct side scale
  double sum = 0.0;
  for (std::int64_t n = 1;; ++n) {
    if (n > budget.max_terms) {
      throw precision_error("Z_xnu: term cap exceeded at x = " + std::to_string(x));
    }
    const double s0 = sigma0_of(n);
    const double u = b * static_cast<double>(n);
    const double t = c * static_cast<double>(n);
    double term = 0.0;
    if (u < 780.0) term += specfun::kernel_K1c(u, budget);
    if (t < 780.0) term -= specfun::kernel_K(t, budget) / (2.0 * kPi * nu * n);
    sum += s0 * term;
    // Certified tails once both envelope regimes apply (arguments >= 1 from
    // the next term on).
    const double m1 = static_cast<double>(n + 1);
    if (b * m1 >= 1.0 && c * m1 >= 1.0) {
      const double root_half_pi = std::sqrt(kPi / 2.0);
      double tail = 2.0 * kP1 * root_half_pi * std::pow(b, 3.5) * quartic_exp_tail(b, m1);
      tail += 2.0 * kP2 * root_half_pi * std::pow(c, 4.5) / (2.0 * kPi * nu) *
              quartic_exp_tail(c, m1);
      const double value = 4.0 * sum;
      if (4.0 * tail < budget.abs_tol || 4.0 * tail < budget.rel_tol * std::abs(value)) {
        return value;
      }
    }
  }
}

double Z_asym_small(double x, double nu) {
  if (!(x > 0.0) || x > 1.0) throw std::domain_error("Z_asym_small: need 0 < x <= 1");
  if (!(nu > 0.0)) throw std::domain_error("Z_asym_small: nu must be positive");
  const double x2 = x * x;
  const double log_qe4_nu = kEulerGamma - std::log(4.0 * kPi) + 4.0 + std::log(nu);
  return 16.0 * x2 * std::log(x2) + 16.0 * x2 * log_qe4_nu;
}

double dilation_residual(double x, double nu, double nu0, const AccuracyBudget& budget) {
  if (!(nu0 > 0.0)) throw std::domain_error("dilation_residual: nu0 must be positive");
  if (nu == nu0) return 0.0;
  return Z_xnu(x, nu, budget) -
         (nu0 / nu) * Z_xnu(x * std::sqrt(nu / nu0), nu0, budget);
}

namespace {

double measure_m_eps(const dirichlet::CoeffSeries& a, double eps) {
  double m = 0.0;
  for (std::int64_t n = 1; n <= a.limit; ++n) {
    const double v = std::abs(a.at(n));
    if (v == 0.0) continue;
    m = std::max(m, v / std::pow(static_cast<double>(n), eps));
  }
  return m;
}

TruncatedValue z_e0_core(const dirichlet::CoeffSeries& a, double x, const TruncationPlan& plan,
                         double m_eps) {
  plan.validate();
  const double x_min = plan.min_admissible_x();
  if (x < x_min * (1.0 - 1e-12)) {  // slack: exact-boundary grids survive rounding
    throw std::domain_error("Z_E0_truncated: x = " + std::to_string(x) +
                            " below minimal admissible x = " + std::to_string(x_min) +
                            " (raise T)");
  }
  const auto t_cut = static_cast<std::int64_t>(plan.T);
  if (a.limit < t_cut) {
    throw std::invalid_argument("Z_E0_truncated: coefficient array shorter than T");
  }
  const double x2 = x * x;
  const double c = 2.0 * kPi * x2;
  double sum = 0.0;
  for (std::int64_t n = 1; n <= t_cut; ++n) {
    const double an = a.at(n);
    if (an == 0.0) continue;
    const double t = c * static_cast<double>(n);
    if (t > 780.0) break;  // kernel underflows for all later n
    sum += an / static_cast<double>(n) * specfun::kernel_K(t);
  }
  TruncatedValue out;
  out.value = (2.0 / kPi) * sum;
  out.m_eps = m_eps;
  const int k = plan.tail_exponent();
  out.tail_exponent = k;
  // log of (2/pi) 312 sqrt(2pi) (k+5)! (M_eps/(k-eps)) T^eps (x^2 T)^{-k}
  double log_bound = std::log(2.0 / kPi) + std::log(312.0) + 0.5 * std::log(2.0 * kPi) +
                     std::lgamma(static_cast<double>(k) + 6.0) - std::log(k - plan.eps) +
                     plan.eps * std::log(plan.T) - k * std::log(x2 * plan.T);
  if (m_eps > 0.0) {
    log_bound += std::log(m_eps);
  } else {
    out.bound = 0.0;  // empty coefficient array: no tail at all
    return out;
  }
  log_bound += 1e-9;  // margin for the log-domain rounding
  double bound = std::exp(log_bound);
  // Keep certification sound when exp underflows.
  bound = std::max(bound, 4.0 * std::numeric_limits<double>::denorm_min());
  out.bound = bound;
  return out;
}

}  // namespace

TruncatedValue Z_E0_truncated(const dirichlet::CoeffSeries& a_weights, double x,
                              const TruncationPlan& plan) {
  return z_e0_core(a_weights, x, plan, measure_m_eps(a_weights, plan.eps));
}

ZE0Evaluator::ZE0Evaluator(dirichlet::CoeffSeries a_weights, TruncationPlan plan)
    : a_(std::move(a_weights)), plan_(plan) {
  plan_.validate();
  if (a_.limit < static_cast<std::int64_t>(plan_.T)) {
    throw std::invalid_argument("ZE0Evaluator: coefficient array shorter than T");
  }
  m_eps_ = measure_m_eps(a_, plan_.eps);
}

TruncatedValue ZE0Evaluator::operator()(double x) const { return z_e0_core(a_, x, plan_, m_eps_); }

ZEValue Z_E(const ZE0Evaluator& eval, double x) {
  const TruncatedValue v = eval(x);
  ZEValue out;
  out.value = -v.value;
  out.bound = v.bound;
  out.note = "small-x remainder O(x^A) dropped; bound covers series truncation only";
  return out;
}

SignScanReport sign_scan(const std::function<std::pair<double, double>(double)>& eval,
                         double x_lo, double x_hi, int points, int threads) {
  if (!(0.0 < x_lo && x_lo < x_hi)) throw std::invalid_argument("sign_scan: need 0 < x_lo < x_hi");
  if (points < 2) throw std::invalid_argument("sign_scan: need at least 2 points");
  SignScanReport report;
  report.points.resize(static_cast<std::size_t>(points));
  const double step = std::log(x_hi / x_lo) / (points - 1);
  parallel_for(points, threads, [&](std::int64_t i) {
    const double x = x_lo * std::exp(step * static_cast<double>(i));
    const auto [value, bound] = eval(x);
    SignScanPoint& pt = report.points[static_cast<std::size_t>(i)];
    pt.x = x;
    pt.value = value;
    pt.bound = bound;
    if (std::abs(value) > bound) {
      pt.sign = value > 0.0 ? '+' : '-';
    } else if (value == 0.0 && bound == 0.0) {
      pt.sign = '0';
    } else {
      pt.sign = '?';
    }
  });
  const SignScanPoint* prev_certified = nullptr;
  for (const auto& pt : report.points) {
    if (pt.sign == '+' || pt.sign == '-') {
      ++report.certified;
      if (prev_certified && prev_certified->sign != pt.sign) {
        report.sign_change_brackets.emplace_back(prev_certified->x, pt.x);
      }
      if (report.prefix_sign == '?') {
        report.prefix_sign = pt.sign;
        report.prefix_end = pt.x;
      } else if (pt.sign == report.prefix_sign && report.sign_change_brackets.empty()) {
        report.prefix_end = pt.x;
      }
      prev_certified = &pt;
    } else {
      ++report.indeterminate;
    }
  }
  return report;
}

double omega_quadrature(const std::function<double(double)>& h, double s, const ZSeriesSpec& spec,
                        double abs_tol) {
  spec.validate();
  if (!(s > spec.n)) {
    throw std::domain_error("omega_quadrature: need s > n for absolute convergence");
  }
  const double decay = s - spec.n;
  const auto integrand = [&](double t) { return h(std::exp(-t)) * std::exp(-decay * t); };
  double total = 0.0;
  double t0 = 0.0;
  int quiet = 0;
  const double seg = std::max(4.0, 8.0 / decay);
  for (int i = 0; i < 200; ++i) {
    const double t1 = t0 + seg;
    const quad::Result r = quad::integrate(integrand, t0, t1, abs_tol * 0.1, 1e-13);
    if (!r.converged) throw precision_error("omega_quadrature: segment failed to converge");
    total += r.value;
    if (std::abs(r.value) < 0.05 * abs_tol) {
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
    t0 = t1;
  }
  throw precision_error("omega_quadrature: tail did not settle");
}

double xi_quadrature(const std::function<double(double)>& g, double s, double abs_tol) {
  const auto integrand = [&](double x) { return g(x) * std::pow(x, s - 1.0); };
  double total = 0.0;
  double a = 1.0;
  int quiet = 0;
  for (int i = 0; i < 64; ++i) {
    const double b = a + std::max(1.0, 0.5 * a);
    const quad::Result r = quad::integrate(integrand, a, b, abs_tol * 0.1, 1e-13);
    if (!r.converged) throw precision_error("xi_quadrature: segment failed to converge");
    total += r.value;
    if (std::abs(r.value) < 0.05 * abs_tol) {
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
    a = b;
  }
  throw precision_error("xi_quadrature: tail did not settle");
}

double toy_h(double x, const AccuracyBudget& budget) {
  if (!(x > 0.0)) throw std::domain_error("toy_h: x must be positive");
  const double inv_sq = 1.0 / (x * x);
  const double big = specfun::theta(inv_sq, budget);
  // theta(x^2) directly where the sum is short; elsewhere through the
  // modular relation theta(y) = theta(1/y)/sqrt(y).
  const double small = x * x >= 0.01 ? specfun::theta(x * x, budget) : big / x;
  return (big - 1.0) - x * (small - 1.0);
}

double toy_g(double x, const AccuracyBudget& budget) {
  if (!(x > 0.0)) throw std::domain_error("toy_g: x must be positive");
  return specfun::theta(x * x, budget) - 1.0;
}

}  // namespace bterm::zseries
