#include "bterm/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bterm/constants.hpp"

namespace bterm::specfun {

namespace {

double g_euler_gamma = kEulerGamma;

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(fn) + ": argument must be positive and finite");
  }
}

// ---------------------------------------------------------------------------
// K0/K1, small arguments (x <= 2): ascending series with logarithm.
//   K0(x) = -(log(x/2) + gamma) I0(x) + sum_{k>=1} H_k (x^2/4)^k / (k!)^2
//   K1(x) = log(x/2) I1(x) + 1/x
//           - (x/4) sum_{k>=0} (psi(k+1) + psi(k+2)) (x^2/4)^k / (k!(k+1)!)
// Terms are positive and fall off factorially; 20 terms reach 1e-17 at x = 2.

double k0_small(double x) {
  const double q = 0.25 * x * x;
  double i0 = 1.0, s = 0.0, term = 1.0, h = 0.0;
  for (int k = 1; k <= 24; ++k) {
    term *= q / (static_cast<double>(k) * k);
    h += 1.0 / k;
    i0 += term;
    s += h * term;
  }
  return -(std::log(0.5 * x) + g_euler_gamma) * i0 + s;
}

double k1_small(double x) {
  const double q = 0.25 * x * x;
  const double half_x = 0.5 * x;
  double i1 = half_x, term_i = half_x;
  // psi(1) = -gamma, psi(2) = 1 - gamma; psi advances by 1/k.
  double psi_a = -g_euler_gamma, psi_b = 1.0 - g_euler_gamma;
  double term_s = 1.0, s = psi_a + psi_b;
  for (int k = 1; k <= 24; ++k) {
    term_i *= q / (static_cast<double>(k) * (k + 1));
    i1 += term_i;
    psi_a += 1.0 / k;
    psi_b += 1.0 / (k + 1);
    term_s *= q / (static_cast<double>(k) * (k + 1));
    s += (psi_a + psi_b) * term_s;
  }
  return std::log(half_x) * i1 + 1.0 / x - 0.25 * x * s;
}

// ---------------------------------------------------------------------------
// K0/K1, mid range (2 < x <= 16): Chebyshev fits of exp(x) sqrt(x) K_nu(x)
// in t = (32/x - 9)/7 (so x=2 -> t=1, x=16 -> t=-1).  Coefficients carry
// <= 7e-20 truncation error; validated against the quadrature oracle in the
// test suite.

constexpr double kK0MidCheb[] = {
    2.43174611303238642485,     -0.0267677835848620084866,
    0.00112185550661148087007,  -0.0000760674798552117392082,
    6.76626050655590820580e-6,  -7.21192408207439692458e-7,
    8.77032362458692835661e-8,  -1.18075802527834124494e-8,
    1.72488545099078223942e-9,  -2.69552732843094363872e-10,
    4.45919088840911419541e-11, -7.74674390848851889059e-12,
    1.40444715369087842214e-12, -2.64379583314914078857e-13,
    5.14637375722458771635e-14, -1.03239330559991933892e-14,
    2.12821501586620680216e-15, -4.49733173595962984047e-16,
    9.72199939573724598059e-17, -2.14600666100393361679e-17,
    4.82941675949839924408e-18, -1.10647762300899121934e-18,
    2.57774864345805968825e-19,
};

constexpr double kK1MidCheb[] = {
    2.74785445662890724446,     0.0895886490059968278878,
    -0.00206719187497282455454, 0.000116928419532113044052,
    -9.49907312538246400677e-6, 9.58077507915732666800e-7,
    -1.12223031952814844505e-7, 1.47018867522402857767e-8,
    -2.10335502709685706927e-9, 3.23310114400526930919e-10,
    -5.27701110811249511605e-11, 9.06542857111074041493e-12,
    -1.62800543036806007150e-12, 3.03975512793783792125e-13,
    -5.87532955857711771277e-14, 1.17130053308349526366e-14,
    -2.40124479787635262656e-15, 5.04926157268738875066e-16,
    -1.08666224143707912324e-16, 2.38901084786733049476e-17,
    -5.35656074299556170464e-18, 1.22313234048468519587e-18,
    -2.84072151485601525591e-19,
};

template <std::size_t N>
double clenshaw(const double (&c)[N], double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t i = N - 1; i >= 1; --i) {
    const double b0 = 2.0 * t * b1 - b2 + c[i];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + 0.5 * c[0];
}

double k_mid_scaled(int nu, double x) {
  const double t = (32.0 / x - 9.0) / 7.0;
  return (nu == 0 ? clenshaw(kK0MidCheb, t) : clenshaw(kK1MidCheb, t)) / std::sqrt(x);
}

// ---------------------------------------------------------------------------
// K0/K1, large arguments (x > 16): asymptotic expansion
//   K_nu(x) ~ sqrt(pi/2x) e^{-x} sum_k a_k(nu) x^{-k},
//   a_k(nu) = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (8k).
// The series alternates, so the first omitted term bounds the remainder.
// At x = 16 roughly 24 terms certify ~4e-15 relative error.

double k_asym_scaled(int nu, double x, const AccuracyBudget& budget, const char* fn) {
  const double mu = 4.0 * nu * nu;
  double sum = 1.0, term = 1.0, prev = std::numeric_limits<double>::max();
  for (int k = 1; k <= 40; ++k) {
    term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    if (std::abs(term) >= prev) break;  // past the optimal truncation point
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) <= 0.1 * budget.rel_tol * std::abs(sum)) {
      return std::sqrt(kPi / (2.0 * x)) * sum;
    }
  }
  if (prev > budget.rel_tol * std::abs(sum)) {
    throw precision_error(std::string(fn) + ": asymptotic series stalls above rel_tol");
  }
  return std::sqrt(kPi / (2.0 * x)) * sum;
}

double bessel_k_scaled(int nu, double x, const AccuracyBudget& budget, const char* fn) {
  require_positive(x, fn);
  budget.validate();
  if (x <= 2.0) {
    return std::exp(x) * (nu == 0 ? k0_small(x) : k1_small(x));
  }
  if (x <= 16.0) {
    return k_mid_scaled(nu, x);
  }
  return k_asym_scaled(nu, x, budget, fn);
}

double bessel_k(int nu, double x, const AccuracyBudget& budget, const char* fn) {
  require_positive(x, fn);
  budget.validate();
  if (x <= 2.0) {
    return nu == 0 ? k0_small(x) : k1_small(x);
  }
  const double scaled = x <= 16.0 ? k_mid_scaled(nu, x) : k_asym_scaled(nu, x, budget, fn);
  const double damp = std::exp(-x);
  const double value = scaled * damp;
  if (value == 0.0 || value < std::numeric_limits<double>::min()) {
    // Underflowed past the normal range: the relative budget is unreachable.
    throw precision_error(std::string(fn) + ": value underflows at x = " + std::to_string(x));
  }
  return value;
}

}  // namespace

void AccuracyBudget::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_terms < 1) {
    throw std::invalid_argument("AccuracyBudget: need rel_tol > 0, abs_tol > 0, max_terms >= 1");
  }
}

const AccuracyBudget& default_budget() {
  static const AccuracyBudget b{};
  return b;
}

double bessel_k0(double x, const AccuracyBudget& budget) { return bessel_k(0, x, budget, "bessel_k0"); }
double bessel_k1(double x, const AccuracyBudget& budget) { return bessel_k(1, x, budget, "bessel_k1"); }

double bessel_k0_scaled(double x, const AccuracyBudget& budget) {
  return bessel_k_scaled(0, x, budget, "bessel_k0_scaled");
}
double bessel_k1_scaled(double x, const AccuracyBudget& budget) {
  return bessel_k_scaled(1, x, budget, "bessel_k1_scaled");
}

double kernel_K(double x, const AccuracyBudget& budget) {
  require_positive(x, "kernel_K");
  if (x > 780.0) return 0.0;  // t^5 e^{-t} below the smallest subnormal
  const double x2 = x * x;
  const double a = x * (16.0 * x2 * x2 + 288.0 * x2 + 16.0);
  const double b = x2 * (128.0 * x2 + 64.0);
  if (x <= 2.0) {
    return a * bessel_k0(x, budget) - b * bessel_k1(x, budget);
  }
  // Scaled form with a split exponential keeps the result in normal range
  // down to the true underflow point.
  const double combo = a * bessel_k0_scaled(x, budget) - b * bessel_k1_scaled(x, budget);
  const double half = std::exp(-0.5 * x);
  return (half * combo) * half;
}

double kernel_K1c(double x, const AccuracyBudget& budget) {
  require_positive(x, "kernel_K1c");
  if (x > 780.0) return 0.0;
  const double x2 = x * x;
  const double a = x2 * (16.0 * x2 + 64.0);
  const double b = 64.0 * x2 * x;
  if (x <= 2.0) {
    return a * bessel_k0(x, budget) - b * bessel_k1(x, budget);
  }
  const double combo = a * bessel_k0_scaled(x, budget) - b * bessel_k1_scaled(x, budget);
  const double half = std::exp(-0.5 * x);
  return (half * combo) * half;
}

double bessel_k0_envelope(double t) {
  return std::sqrt(kPi / (2.0 * t)) * std::exp(-t) * (1.0 + 1.0 / (8.0 * t));
}

double bessel_k1_envelope(double t) {
  return std::sqrt(kPi / (2.0 * t)) * std::exp(-t) * (1.0 + 3.0 / (8.0 * t));
}

double kernel_K_envelope(double t) {
  const double t2 = t * t;
  const double a = t * (16.0 * t2 * t2 + 288.0 * t2 + 16.0);
  const double b = t2 * (128.0 * t2 + 64.0);
  return a * bessel_k0_envelope(t) + b * bessel_k1_envelope(t);
}

double kernel_K1c_envelope(double t) {
  const double t2 = t * t;
  const double a = t2 * (16.0 * t2 + 64.0);
  const double b = 64.0 * t2 * t;
  return a * bessel_k0_envelope(t) + b * bessel_k1_envelope(t);
}

double theta(double x, const AccuracyBudget& budget) {
  require_positive(x, "theta");
  budget.validate();
  const double a = kPi * x;
  double sum = 1.0;
  for (std::int64_t k = 1;; ++k) {
    if (k > budget.max_terms) {
      throw precision_error("theta: term cap exceeded at x = " + std::to_string(x));
    }
    const double term = std::exp(-a * static_cast<double>(k) * k);
    sum += 2.0 * term;
    // Tail over j > k:  2 e^{-pi k^2 x} e^{-pi(2k+1)x} / (1 - e^{-pi x})
    const double tail = 2.0 * term * std::exp(-a * (2.0 * k + 1.0)) / (-std::expm1(-a));
    if (tail < budget.abs_tol || tail < budget.rel_tol * sum) return sum;
  }
}

double eisenstein_E(double y, const AccuracyBudget& budget) {
  require_positive(y, "eisenstein_E");
  budget.validate();
  const double sy = std::sqrt(y);
  const double a = 2.0 * kPi * y;
  double series = 0.0;
  for (std::int64_t n = 1;; ++n) {
    if (n > budget.max_terms) {
      throw precision_error("eisenstein_E: term cap exceeded at y = " + std::to_string(y));
    }
    const double t = a * static_cast<double>(n);
    double sigma0 = 0.0;
    for (std::int64_t d = 1; d * d <= n; ++d) {
      if (n % d == 0) sigma0 += (d * d == n) ? 1.0 : 2.0;
    }
    if (t < 700.0) series += sigma0 * bessel_k0(t, budget);
    // Tail majorant: sigma0(N) <= N and K0(t) <= envelope(t) for t >= 1, so
    //   sum_{N>n} N K0(aN) <= sqrt(pi/2a)(1 + 1/(8a(n+1))) sqrt(1/(ae))
    //                          e^{-a(n+1)/2} / (1 - e^{-a/2}).
    if (t >= 1.0) {
      const double tail = std::sqrt(kPi / (2.0 * a)) * (1.0 + 1.0 / (8.0 * a * (n + 1))) *
                          std::sqrt(1.0 / (a * std::exp(1.0))) *
                          std::exp(-0.5 * a * (n + 1)) / (-std::expm1(-0.5 * a));
      const double partial = sy * std::log(y) + (kEulerGamma - std::log(4.0 * kPi)) * sy +
                             4.0 * sy * series;
      if (4.0 * sy * tail < budget.abs_tol ||
          4.0 * sy * tail < budget.rel_tol * std::abs(partial)) {
        return partial;
      }
    }
  }
}

namespace detail {
void set_euler_gamma_for_testing(double value) { g_euler_gamma = value; }
void reset_euler_gamma_for_testing() { g_euler_gamma = kEulerGamma; }
}  // namespace detail

}  // namespace bterm::specfun
