#include <doctest.h>

#include <cmath>
#include <vector>

#include "bterm/constants.hpp"
#include "bterm/curves.hpp"
#include "bterm/errors.hpp"
#include "bterm/parallel.hpp"
#include "bterm/quadrature.hpp"
#include "bterm/specfun.hpp"
#include "bterm/zseries.hpp"

using namespace bterm;
using dirichlet::CoeffSeries;
using zseries::TruncationPlan;
using zseries::ZSeriesSpec;

TEST_CASE("kappa_gamma frozen values and rapid decay") {
  CHECK(zseries::kappa_gamma(1.0) == doctest::Approx(0.0036761220667799909).epsilon(1e-11));
  CHECK(zseries::kappa_gamma(0.5) == doctest::Approx(0.12564272930444251).epsilon(1e-11));
  CHECK(zseries::kappa_gamma(2.0) == doctest::Approx(4.8848461822573706e-6).epsilon(1e-11));
  CHECK(zseries::kappa_gamma(20.0) < 1e-53);
  CHECK_THROWS_AS(zseries::kappa_gamma(0.0), std::domain_error);
  specfun::AccuracyBudget starved;
  starved.max_terms = 3;
  CHECK_THROWS_AS(zseries::kappa_gamma(1e-3, starved), precision_error);
}

TEST_CASE("kappa_gamma equals the multiplicative theta convolution") {
  // kappa(x) = int_0^inf (theta(a^2)-1)(theta(x^2 a^{-2})-1) da/a, a = e^u
  for (double x : {0.5, 1.0, 2.0}) {
    const auto f = [x](double u) {
      const double a2 = std::exp(2.0 * u);
      return (specfun::theta(a2) - 1.0) * (specfun::theta(x * x / a2) - 1.0);
    };
    const double integral = quad::integrate_or_throw(f, -6.0, 6.0, 1e-11, 1e-13);
    CHECK(std::abs(integral - zseries::kappa_gamma(x)) <= 1e-9);
  }
}

TEST_CASE("kappa_toy sums to the theta deficit") {
  for (double x : {0.7, 1.0, 1.5}) {
    double sum = 0.0;
    for (int nu = 1; nu < 60; ++nu) sum += zseries::kappa_toy(nu * x);
    CHECK(std::abs(sum - (specfun::theta(x * x) - 1.0)) <= 1e-12);
  }
  CHECK(zseries::kappa_toy(0.0) == 2.0);
  // Mellin transform at s = 2: int_0^inf 2 e^{-pi x^2} x dx = 1/pi
  const auto f = [](double x) { return zseries::kappa_toy(x) * x; };
  CHECK(quad::integrate_or_throw(f, 0.0, 8.0, 1e-12) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-10));
}

TEST_CASE("V vanishes at x = 1 and obeys the functional equation") {
  for (int nu = 1; nu <= 10; ++nu) {
    CHECK(std::abs(zseries::V(1.0, nu)) <= 1e-11);
  }
  for (double x : {0.4, 0.75, 0.9}) {
    const double lhs = zseries::V(1.0 / x, 2.0);
    const double rhs = -zseries::V(x, 2.0) / (x * x);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("V frozen values and the Eisenstein route") {
  CHECK(zseries::V(0.8, 1.0) == doctest::Approx(-0.028539758766215143).epsilon(1e-10));
  CHECK(zseries::V(0.9, 1.0) == doctest::Approx(-0.010181436088457203).epsilon(1e-10));
  for (double x : {0.5, 0.8, 1.3}) {
    for (double nu : {1.0, 2.0, 5.0}) {
      CHECK(std::abs(zseries::V(x, nu) - zseries::V_eisenstein(x, nu)) <= 1e-9);
    }
  }
}

TEST_CASE("Z_xnu: frozen value, derivative oracle, signs") {
  CHECK(zseries::Z_xnu(0.8, 1.0) == doctest::Approx(16.383020188711143).epsilon(1e-9));
  // fourth derivative in t = -log x via the O(h^4) stencil
  const double h = 1e-2;
  const double c[7] = {-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0};
  for (double x : {0.7, 0.9, 1.2, 1.6}) {
    const double t0 = -std::log(x);
    double fd = 0.0;
    for (int j = -3; j <= 3; ++j) fd += c[j + 3] * zseries::V(std::exp(-(t0 + j * h)), 1.0);
    fd /= 6.0 * h * h * h * h;
    CHECK(std::abs(fd / zseries::Z_xnu(x, 1.0) - 1.0) <= 1e-5);
  }
  for (double x : {0.05, 0.1, 0.2}) CHECK(zseries::Z_xnu(x, 1.0) < 0.0);
  for (double x : {3.0, 5.0, 10.0}) CHECK(zseries::Z_xnu(x, 1.0) > 0.0);
}

TEST_CASE("Z_asym_small algebra and remainder slope") {
  // the leading pair vanishes at x = (Q e^4 nu)^{-1/2}
  const double q_e4 = std::exp(kEulerGamma) / (4.0 * kPi) * std::exp(4.0);
  const double x_zero = 1.0 / std::sqrt(q_e4);
  CHECK(std::abs(zseries::Z_asym_small(x_zero, 1.0)) <= 1e-12);
  // log scaling in nu: Z(x, e nu) - Z(x, nu) = 16 x^2
  for (double x : {0.1, 0.4, 0.9}) {
    CHECK(zseries::Z_asym_small(x, std::exp(1.0) * 2.0) - zseries::Z_asym_small(x, 2.0) ==
          doctest::Approx(16.0 * x * x).epsilon(1e-12));
  }
  // At nu = 1 the remainder integrand [(nu^{-1}x^2)^s - nu^{-1}(nu x^2)^s]
  // vanishes identically, so the two leading terms ARE Z(x,1) on (0,1].
  for (double x : {0.05, 0.15, 0.3, 0.7, 1.0}) {
    const double z = zseries::Z_xnu(x, 1.0);
    CHECK(std::abs(z - zseries::Z_asym_small(x, 1.0)) <= 1e-9 * std::max(1.0, std::abs(z)));
  }
  // For nu > 1 the remainder is active; its decay beats x^{2(1+delta)},
  // delta = 0.5: log-log slope >= 2.5 across the active window, and the
  // constant fitted at the window top dominates every smaller x.
  std::vector<double> xs, rs;
  for (double x : {0.25, 0.3, 0.35, 0.4, 0.45}) {
    xs.push_back(std::log(x));
    rs.push_back(std::log(std::abs(zseries::Z_xnu(x, 5.0) - zseries::Z_asym_small(x, 5.0))));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += rs[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * rs[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 2.5);
  const double c_fit =
      std::abs(zseries::Z_xnu(0.5, 5.0) - zseries::Z_asym_small(0.5, 5.0)) / std::pow(0.5, 3.0);
  for (double x : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    CHECK(std::abs(zseries::Z_xnu(x, 5.0) - zseries::Z_asym_small(x, 5.0)) <=
          c_fit * std::pow(x, 3.0));
  }
  CHECK_THROWS_AS(zseries::Z_asym_small(1.5, 1.0), std::domain_error);
}

TEST_CASE("dilation residual") {
  CHECK(zseries::dilation_residual(0.3, 2.0, 2.0) == 0.0);
  // residual bounded by nu^{-1-d} x^{2(1+d)} + nu^{-1} nu0^{-d} (x sqrt(nu/nu0))^{2(1+d)}
  // with d = 0.5: fit the constant on moderate x, then check extrapolation at x = 0.05.
  const double d = 0.5;
  for (double nu : {2.0, 4.0, 8.0}) {
    const auto denom = [&](double x) {
      return std::pow(nu, -1.0 - d) * std::pow(x, 2.0 * (1.0 + d)) +
             (1.0 / nu) * std::pow(x * std::sqrt(nu), 2.0 * (1.0 + d));
    };
    double c_fit = 0.0;
    for (double x : {0.2, 0.3, 0.4, 0.5}) {
      c_fit = std::max(c_fit, std::abs(zseries::dilation_residual(x, nu, 1.0)) / denom(x));
    }
    CHECK(std::abs(zseries::dilation_residual(0.05, nu, 1.0)) <= 2.0 * c_fit * denom(0.05));
  }
  // nu -> infinity at fixed x sqrt(nu): residual shrinks like 1/nu
  const double r4 = std::abs(zseries::dilation_residual(0.5 / 2.0, 4.0, 1.0));
  const double r16 = std::abs(zseries::dilation_residual(0.5 / 4.0, 16.0, 1.0));
  const double r64 = std::abs(zseries::dilation_residual(0.5 / 8.0, 64.0, 1.0));
  CHECK(r16 <= 3.0 * r4 * (4.0 / 16.0));
  CHECK(r64 <= 3.0 * r4 * (4.0 / 64.0));
}

TEST_CASE("Z_E0_truncated: delta weights reduce to the bare kernel sum") {
  const auto a = dirichlet::a_weights(CoeffSeries::delta1(4000));  // = sigma0
  TruncationPlan plan;
  plan.T = 4000.0;
  const double x = 0.5;
  const auto v = zseries::Z_E0_truncated(a, x, plan);
  double direct = 0.0;
  const auto sigma = CoeffSeries::sigma0(4000);
  for (std::int64_t n = 1; n <= 4000; ++n) {
    const double t = 2.0 * kPi * n * x * x;
    if (t > 780.0) break;
    direct += sigma.at(n) / static_cast<double>(n) * specfun::kernel_K(t);
  }
  direct *= 2.0 / kPi;
  CHECK(v.value == doctest::Approx(direct).epsilon(1e-13));
  CHECK(v.bound > 0.0);
  CHECK(v.tail_exponent == 2);  // ceil(0.5 * 2 + 1)
}

TEST_CASE("Z_E0_truncated matches the assembled frequency sum") {
  // c supported on nu <= 5: the assembled sum c . Z(x, nu) equals the negated
  // kernel sum up to the certified tail plus the inverted-argument remainder.
  CoeffSeries c = CoeffSeries::zeros(2000, "tiny");
  c.at(1) = 1.0;
  c.at(2) = 0.5;
  c.at(4) = 0.2;
  c.at(5) = 0.1;
  const auto a = dirichlet::a_weights(c);
  TruncationPlan plan;
  plan.T = 2000.0;
  const double x = 0.3;
  const auto v = zseries::Z_E0_truncated(a, x, plan);
  double assembled = 0.0;
  for (std::int64_t nu = 1; nu <= 5; ++nu) {
    if (c.at(nu) != 0.0) assembled += c.at(nu) * zseries::Z_xnu(x, static_cast<double>(nu));
  }
  CHECK(std::abs(assembled - (-v.value)) <= v.bound + 1e-6);
}

TEST_CASE("Z_E0_truncated certificate: doubling T stays within the bound") {
  const auto curve = curves::builtin_curve("11a");
  const auto c = curves::cE_coeffs(curve, 64'000);
  const auto a = dirichlet::a_weights(c);
  TruncationPlan plan;
  plan.T = 16'000.0;
  TruncationPlan plan4 = plan;
  plan4.T = 64'000.0;
  for (double x = plan.min_admissible_x() * 1.01; x < 0.5; x *= 1.5) {
    const auto v1 = zseries::Z_E0_truncated(a, x, plan);
    const auto v4 = zseries::Z_E0_truncated(a, x, plan4);
    CHECK(std::abs(v1.value - v4.value) <= v1.bound);
  }
}

TEST_CASE("Z_E0_truncated domain checks") {
  const auto a = dirichlet::a_weights(CoeffSeries::delta1(100));
  TruncationPlan plan;
  plan.T = 100.0;
  CHECK_THROWS_AS(zseries::Z_E0_truncated(a, 0.1, plan), std::domain_error);  // x below sqrt(R/T)
  plan.T = 200.0;
  CHECK_THROWS_AS(zseries::Z_E0_truncated(a, 0.9, plan), std::invalid_argument);  // short array
  TruncationPlan bad;
  bad.T = 100.0;
  bad.alpha = 0.05;
  bad.beta = 1.5;
  bad.eps = 0.5;  // alpha*beta < eps
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Z_xnu reports a precision error when the term cap blocks the tail") {
  specfun::AccuracyBudget starved;
  starved.max_terms = 10'000;
  CHECK_THROWS_AS(zseries::Z_xnu(1e-4, 1.0, starved), precision_error);
}

TEST_CASE("parallel_for propagates worker exceptions and preserves order") {
  std::vector<double> out(64, 0.0);
  bterm::parallel_for(64, 4, [&](std::int64_t i) { out[static_cast<std::size_t>(i)] = 2.0 * i; });
  for (std::int64_t i = 0; i < 64; ++i) CHECK(out[static_cast<std::size_t>(i)] == 2.0 * i);
  CHECK_THROWS_AS(bterm::parallel_for(16, 4,
                                      [](std::int64_t i) {
                                        if (i == 7) throw std::runtime_error("boom");
                                      }),
                  std::runtime_error);
}

TEST_CASE("Z_E wrapper and evaluator") {
  const auto curve = curves::builtin_curve("37a");
  TruncationPlan plan;
  plan.T = 20'000.0;
  const zseries::ZE0Evaluator eval(dirichlet::a_weights(curves::cE_coeffs(curve, 20'000)), plan);
  const auto z = zseries::Z_E(eval, 0.12);
  const auto direct = eval(0.12);
  CHECK(z.value == -direct.value);
  CHECK(z.bound == direct.bound);
  CHECK(!z.note.empty());
}

TEST_CASE("sign_scan reporting") {
  // constant positive evaluator: one certified sign, no brackets
  const auto plus = [](double) { return std::make_pair(1.0, 0.5); };
  const auto rep1 = zseries::sign_scan(plus, 0.1, 10.0, 25);
  CHECK(rep1.sign_change_brackets.empty());
  CHECK(rep1.certified == 25);
  CHECK(rep1.prefix_sign == '+');
  CHECK(rep1.prefix_end == doctest::Approx(10.0));

  // bound above |value|: everything indeterminate
  const auto fuzzy = [](double x) { return std::make_pair(std::sin(x), 2.0); };
  const auto rep2 = zseries::sign_scan(fuzzy, 0.1, 10.0, 25);
  CHECK(rep2.certified == 0);
  CHECK(rep2.indeterminate == 25);
  CHECK(rep2.prefix_sign == '?');

  // synthetic crossing at x = 1
  const auto cross = [](double x) { return std::make_pair(x - 1.0, 1e-12); };
  const auto rep3 = zseries::sign_scan(cross, 0.5, 2.0, 41);
  REQUIRE(rep3.sign_change_brackets.size() == 1);
  CHECK(rep3.sign_change_brackets[0].first < 1.0);
  CHECK(rep3.sign_change_brackets[0].second > 1.0);
  CHECK(rep3.prefix_sign == '-');

  // deterministic under threading
  const auto rep4 = zseries::sign_scan(cross, 0.5, 2.0, 41, 4);
  for (std::size_t i = 0; i < rep3.points.size(); ++i) {
    CHECK(rep3.points[i].value == rep4.points[i].value);
    CHECK(rep3.points[i].sign == rep4.points[i].sign);
  }
  CHECK_THROWS_AS(zseries::sign_scan(plus, 1.0, 0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(zseries::sign_scan(plus, 0.5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("toy boundary-term quadratures") {
  const auto spec = ZSeriesSpec::toy();
  const auto h = [](double x) { return zseries::toy_h(x); };
  CHECK(zseries::omega_quadrature(h, 3.0, spec) == doctest::Approx(-1.0 / 6.0).epsilon(1e-8));
  CHECK(zseries::omega_quadrature(h, 2.0, spec) == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(zseries::omega_quadrature(h, 4.0, spec) == doctest::Approx(-1.0 / 3.0 + 0.25).epsilon(1e-8));
  CHECK_THROWS_AS(zseries::omega_quadrature(h, 0.5, spec), std::domain_error);

  const auto g = [](double x) { return zseries::toy_g(x); };
  // xi(1/2) combines with the polar term to the completed zeta at 1/2
  const double xi_half = zseries::xi_quadrature(g, 0.5);
  CHECK(xi_half == doctest::Approx(0.011516887246743560).epsilon(1e-8));
  const double zhat_half = 2.0 * xi_half + (1.0 / (0.5 - 1.0) - 1.0 / 0.5);
  CHECK(zhat_half ==
        doctest::Approx(std::pow(kPi, -0.25) * kGamma14 * kZetaHalf).epsilon(1e-8));
  // direct product route at s = 3
  const double zhat3 = zseries::xi_quadrature(g, 3.0) + zseries::xi_quadrature(g, -2.0) +
                       (1.0 / (3.0 - 1.0) - 1.0 / 3.0);
  CHECK(zhat3 == doctest::Approx(kZeta3 / (2.0 * kPi)).epsilon(1e-9));
  // positive integrand, positive values
  for (double s : {-2.0, 0.5, 3.0}) CHECK(zseries::xi_quadrature(g, s) > 0.0);
}

TEST_CASE("toy h functional equation") {
  for (int i = 0; i < 20; ++i) {
    const double x = 0.1 + 0.045 * i;
    CHECK(std::abs(zseries::toy_h(1.0 / x) + zseries::toy_h(x) / x) <= 1e-10);
  }
}

TEST_CASE("spec structs validate") {
  CHECK_FALSE(ZSeriesSpec::elliptic().experimental());
  CHECK_FALSE(ZSeriesSpec::toy().experimental());
  ZSeriesSpec odd{1, 3, 2, 1};
  CHECK(odd.experimental());
  ZSeriesSpec bad{2, 1, 1, 1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  TruncationPlan plan;
  plan.T = 100.0;
  CHECK(plan.tail_exponent() == 2);
  plan.beta = 6.0;
  plan.alpha = 0.9;
  CHECK(plan.tail_exponent() == 7);  // ceil(6.4)
  CHECK(plan.min_admissible_x() == doctest::Approx(std::sqrt(0.2)));
}
