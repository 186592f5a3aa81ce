#include <doctest.h>

#include <cmath>

#include "bterm/constants.hpp"
#include "bterm/errors.hpp"
#include "bterm/specfun.hpp"
#include "bterm/verify.hpp"

using namespace bterm;
using specfun::AccuracyBudget;

TEST_CASE("bessel K0/K1 frozen oracle values") {
  // Frozen from the quadrature oracle int_0^inf e^{-x cosh t} {1, cosh t} dt.
  CHECK(specfun::bessel_k0(1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-14));
  CHECK(specfun::bessel_k0(0.1) == doctest::Approx(2.4270690247020166).epsilon(1e-14));
  CHECK(specfun::bessel_k1(1.0) == doctest::Approx(0.6019072301972346).epsilon(1e-14));
  CHECK(specfun::bessel_k1(2.0) == doctest::Approx(0.13986588181652243).epsilon(1e-14));
}

TEST_CASE("bessel matches the quadrature oracle across all three method ranges") {
  for (double x = 1e-3; x < 55.0; x *= 1.45) {
    const double o0 = verify::oracle_k0(x);
    const double o1 = verify::oracle_k1(x);
    CHECK(std::abs(specfun::bessel_k0(x) / o0 - 1.0) <= 1e-12);
    CHECK(std::abs(specfun::bessel_k1(x) / o1 - 1.0) <= 1e-12);
  }
}

TEST_CASE("bessel asymptotic envelope for x >= 10") {
  for (double x : {10.0, 14.0, 20.0, 50.0, 100.0}) {
    const double base = std::sqrt(kPi / (2.0 * x)) * std::exp(-x);
    const double k0 = specfun::bessel_k0(x);
    CHECK(k0 >= base * (1.0 - 1.0 / (8.0 * x)));
    CHECK(k0 <= base * (1.0 + 1.0 / (8.0 * x)));
    const double k1 = specfun::bessel_k1(x);
    CHECK(k1 >= base * (1.0 - 3.0 / (8.0 * x)));
    CHECK(k1 <= base * (1.0 + 3.0 / (8.0 * x)));
  }
}

TEST_CASE("K1 dominates K0 and both decrease") {
  double prev = specfun::bessel_k0(1e-3);
  for (double x = 1e-3; x < 100.0; x *= 1.7) {
    CHECK(specfun::bessel_k1(x) > specfun::bessel_k0(x));
    const double k0 = specfun::bessel_k0(x);
    CHECK(k0 > 0.0);
    if (x > 1e-3) CHECK(k0 < prev);
    prev = k0;
  }
}

TEST_CASE("bessel domain and precision errors") {
  CHECK_THROWS_AS(specfun::bessel_k0(0.0), std::domain_error);
  CHECK_THROWS_AS(specfun::bessel_k0(-1.0), std::domain_error);
  CHECK_THROWS_AS(specfun::bessel_k1(-0.5), std::domain_error);
  CHECK_THROWS_AS(specfun::bessel_k0(760.0), precision_error);  // subnormal underflow
  AccuracyBudget bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(specfun::bessel_k0(1.0, bad), std::invalid_argument);
}

TEST_CASE("kernel values and limits") {
  // (16 + 288 + 16) K0(1) - (128 + 64) K1(1), frozen composition
  CHECK(specfun::kernel_K(1.0) == doctest::Approx(19.161632039157628).epsilon(1e-12));
  // x -> 0+ limit is zero: dominated by 16x log(2/x)
  CHECK(std::abs(specfun::kernel_K(1e-4)) < 2e-2);
  CHECK(std::abs(specfun::kernel_K(1e-6)) < 3e-4);
  // far tail underflows to an exact zero
  CHECK(specfun::kernel_K(800.0) == 0.0);
  CHECK(specfun::kernel_K1c(800.0) == 0.0);
  // representable deep-tail values stay finite and positive (leading 16t^5 K0)
  const double deep = specfun::kernel_K(700.0);
  CHECK(deep > 0.0);
  CHECK(std::isfinite(deep));
}

TEST_CASE("kernel consistency with the fourth log-derivative") {
  // (x d/dx)^4 [x^2 K0(x^2)] = K(x^2): O(h^4) central difference of
  // f(t) = e^{2t} K0(e^{2t}) in t = log x, h = 1e-2.
  const double h = 1e-2;
  const double c[7] = {-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0};
  for (double x : {0.75, 1.0, 1.25, 1.5, 1.8}) {
    const double t0 = std::log(x);
    double fd = 0.0;
    for (int j = -3; j <= 3; ++j) {
      const double e2t = std::exp(2.0 * (t0 + j * h));
      fd += c[j + 3] * e2t * specfun::bessel_k0(e2t);
    }
    fd /= 6.0 * h * h * h * h;
    const double exact = specfun::kernel_K(x * x);
    CHECK(std::abs(fd / exact - 1.0) <= 1e-5);
  }
}

TEST_CASE("theta frozen value and modularity") {
  CHECK(specfun::theta(1.0) == doctest::Approx(1.0864348112133080).epsilon(1e-14));
  CHECK(specfun::theta(0.5) == doctest::Approx(1.4194954880837661).epsilon(1e-14));
  for (double x : {0.5, 2.0, 10.0}) {
    CHECK(std::abs(specfun::theta(1.0 / x) - std::sqrt(x) * specfun::theta(x)) <= 1e-12);
  }
  CHECK(std::abs(specfun::theta(50.0) - 1.0) <= 1e-60);
  CHECK_THROWS_AS(specfun::theta(0.0), std::domain_error);
}

TEST_CASE("theta truncation is tolerance-driven, not term-count driven") {
  AccuracyBudget coarse;
  coarse.abs_tol = 1e-6;
  coarse.rel_tol = 1e-6;
  AccuracyBudget fine;
  fine.abs_tol = 1e-15;
  fine.rel_tol = 1e-15;
  for (double x : {0.07, 0.3, 1.0, 4.0}) {
    CHECK(std::abs(specfun::theta(x, coarse) - specfun::theta(x, fine)) <= 1e-6);
  }
  AccuracyBudget starved;
  starved.max_terms = 2;
  CHECK_THROWS_AS(specfun::theta(1e-4, starved), precision_error);
}

TEST_CASE("eisenstein central value") {
  CHECK(specfun::eisenstein_E(1.0) == doctest::Approx(-1.9501324600009779).epsilon(1e-12));
  for (double y : {1.3, 2.0, 5.0}) {
    CHECK(std::abs(specfun::eisenstein_E(y) - specfun::eisenstein_E(1.0 / y)) <= 1e-10);
  }
  // large-y: Fourier tail below the first-term bound
  const double y = 3.0;
  const double main_terms =
      std::sqrt(y) * std::log(y) + (kEulerGamma - std::log(4.0 * kPi)) * std::sqrt(y);
  CHECK(std::abs(specfun::eisenstein_E(y) - main_terms) <=
        8.0 * std::sqrt(y) * specfun::bessel_k0(2.0 * kPi * y));
  CHECK_THROWS_AS(specfun::eisenstein_E(-2.0), std::domain_error);
}

TEST_CASE("stored constants survive independent oracles") {
  // zeta(1/2) via alternating-series acceleration (Cohen-Rodriguez
  // Villegas-Zagier) applied to eta(s) = (1 - 2^{1-s}) zeta(s).
  const auto zeta_via_eta = [](double s) {
    const int n = 40;
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d, eta = 0.0;
    for (int k = 0; k < n; ++k) {
      c = b - c;
      eta += c * std::pow(k + 1.0, -s);
      b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0));
    }
    return eta / d / (1.0 - std::pow(2.0, 1.0 - s));
  };
  CHECK(zeta_via_eta(0.5) == doctest::Approx(kZetaHalf).epsilon(1e-13));
  CHECK(zeta_via_eta(3.0) == doctest::Approx(kZeta3).epsilon(1e-13));
  // Gamma(1/4) via the arithmetic-geometric mean: Gamma(1/4)^2 = (2pi)^{3/2} / agm(sqrt 2, 1).
  double a = std::sqrt(2.0), g = 1.0;
  for (int i = 0; i < 8; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  CHECK(std::sqrt(std::pow(2.0 * kPi, 1.5) / a) == doctest::Approx(kGamma14).epsilon(1e-14));
}
