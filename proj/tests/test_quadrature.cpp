#include <doctest.h>

#include <cmath>

#include "bterm/constants.hpp"
#include "bterm/errors.hpp"
#include "bterm/quadrature.hpp"

using namespace bterm;

TEST_CASE("polynomial and trig integrals") {
  const auto sq = [](double x) { return x * x; };
  CHECK(quad::integrate_or_throw(sq, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto s = [](double x) { return std::sin(x); };
  CHECK(quad::integrate_or_throw(s, 0.0, kPi) == doctest::Approx(2.0).epsilon(1e-13));
  const auto osc = [](double x) { return std::sin(40.0 * x) * std::exp(-x); };
  const double exact = 40.0 / 1601.0 * (1.0 - std::exp(-kPi) * std::cos(40.0 * kPi)) -
                       std::exp(-kPi) * std::sin(40.0 * kPi) / 1601.0;
  CHECK(quad::integrate_or_throw(osc, 0.0, kPi, 1e-12) == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("integrable endpoint singularity") {
  // int_0^1 log(1/x) dx = 1; endpoints are never sampled
  const auto f = [](double x) { return std::log(1.0 / x); };
  CHECK(quad::integrate_or_throw(f, 0.0, 1.0, 1e-10) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty interval and failure reporting") {
  const auto f = [](double x) { return x; };
  const auto r = quad::integrate(f, 2.0, 2.0);
  CHECK(r.converged);
  CHECK(r.value == 0.0);
  // a single segment cannot resolve a sharp spike to 1e-12
  const auto spike = [](double x) { return 1.0 / (1e-8 + (x - 0.3) * (x - 0.3)); };
  const auto bad = quad::integrate(spike, 0.0, 1.0, 1e-12, 1e-12, 1);
  CHECK_FALSE(bad.converged);
  CHECK_THROWS_AS(quad::integrate_or_throw(spike, 0.0, 1.0, 1e-12, 1e-12, 1), precision_error);
}
