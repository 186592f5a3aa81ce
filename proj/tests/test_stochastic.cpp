#include <doctest.h>

#include <cmath>
#include <vector>

#include "bterm/dirichlet.hpp"
#include "bterm/stochastic.hpp"

using namespace bterm;
using dirichlet::CoeffSeries;

namespace {

// plain double polynomial product, truncated
std::vector<double> mul(const std::vector<double>& f, const std::vector<double>& g, int order) {
  std::vector<double> h(static_cast<std::size_t>(order) + 1, 0.0);
  for (std::size_t i = 0; i < f.size() && static_cast<int>(i) <= order; ++i) {
    for (std::size_t j = 0; j < g.size() && static_cast<int>(i + j) <= order; ++j) {
      h[i + j] += f[i] * g[j];
    }
  }
  return h;
}

}  // namespace

TEST_CASE("omega sampling is deterministic and on the circle") {
  const auto s1 = stochastic::sample_omega({2, 3}, 1000, 42);
  const auto s2 = stochastic::sample_omega({2, 3}, 1000, 42);
  CHECK(s1.angles == s2.angles);
  CHECK(s1.angles.count(2) == 0);
  CHECK(s1.angles.count(5) == 1);
  const auto s3 = stochastic::sample_omega({2, 3}, 1000, 43);
  CHECK(s1.angles != s3.angles);
  for (const auto& [p, angle] : s1.angles) {
    CHECK(angle >= 0.0);
    CHECK(angle < 2.0 * 3.14159265358979324);
    CHECK(std::abs(s1.two_re(p)) <= 2.0);
  }
  CHECK_THROWS_AS(stochastic::sample_omega({}, 1, 7), std::invalid_argument);
}

TEST_CASE("sampled angles have centred cosines") {
  const auto s = stochastic::sample_omega({}, 10'000, 20260810);
  double mean = 0.0;
  std::int64_t count = 0;
  for (const auto& [p, angle] : s.angles) {
    mean += std::cos(angle);
    ++count;
  }
  mean /= static_cast<double>(count);
  CHECK(count == 1229);  // pi(10^4)
  CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("single-prime local identity to order six") {
  // (1 - 2 sqrt(p) Re w u + p u^2) / ((1-u)(1-p u))
  //   = 1 + (p + 1 - 2 sqrt(p) Re w) sum_{n>=1} S_{n-1} u^n
  for (const auto& [p, re] : std::vector<std::pair<double, double>>{
           {2.0, 0.37}, {5.0, -0.92}, {13.0, 1.0}, {29.0, -1.0}}) {
    const int order = 6;
    const std::vector<double> numer = {1.0, -2.0 * std::sqrt(p) * re, p};
    const auto denom_inv =
        mul(dirichlet::reciprocal_series({1.0, -1.0}, order),
            dirichlet::reciprocal_series({1.0, -p}, order), order);
    const auto lhs = mul(numer, denom_inv, order);
    std::vector<double> rhs(order + 1, 0.0);
    rhs[0] = 1.0;
    double s_prev = 0.0, p_pow = 1.0;
    for (int n = 1; n <= order; ++n) {
      s_prev = s_prev + p_pow;  // S_{n-1}
      p_pow *= p;
      rhs[static_cast<std::size_t>(n)] = (p + 1.0 - 2.0 * std::sqrt(p) * re) * s_prev;
    }
    for (int n = 0; n <= order; ++n) {
      CHECK(lhs[static_cast<std::size_t>(n)] ==
            doctest::Approx(rhs[static_cast<std::size_t>(n)]).epsilon(1e-10));
    }
  }
}

TEST_CASE("d_omega coefficients: support, unit term, nonnegativity") {
  const auto omega = stochastic::sample_omega({}, 110, 7);
  const auto c = stochastic::d_omega_coeffs(omega, 10'000);
  CHECK(c.at(1) == 1.0);
  for (std::int64_t n = 1; n <= c.limit; ++n) {
    CHECK(c.at(n) >= 0.0);
    if (c.at(n) != 0.0) {
      const auto root = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
      CHECK(root * root == n);
    }
  }
  // excluded primes contribute the pure zeta part: c(p^2) = S_1^2-ish instead
  const auto omega_s2 = stochastic::sample_omega({2}, 110, 7);
  const auto c2 = stochastic::d_omega_coeffs(omega_s2, 100);
  // ((1-v)(1-2v))^{-2} coefficient of v: 2 (1 + p) = 6
  CHECK(c2.at(4) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK_THROWS_AS(stochastic::d_omega_coeffs(stochastic::sample_omega({}, 5, 1), 100),
                  std::invalid_argument);  // bound 5 too small for limit 100
}

TEST_CASE("d_omega at omega = 1 matches the direct expansion oracle") {
  stochastic::OmegaSample flat;
  flat.bound = 200;
  for (std::int32_t p : dirichlet::primes_up_to(200)) {
    if (p <= 200) flat.angles[p] = 0.0;  // omega(p) = 1
  }
  const auto c = stochastic::d_omega_coeffs(flat, 40'000);
  for (std::int64_t p : {2, 3, 5}) {
    const int order = 4;
    const double sp = std::sqrt(static_cast<double>(p));
    // squared numerator (1 - sqrt(p) v)^2 against ((1-v)(1-pv))^{-2}
    const std::vector<double> numer = {1.0, -2.0 * sp, static_cast<double>(p)};
    auto denom_sq = mul(dirichlet::reciprocal_series({1.0, -1.0}, order),
                        dirichlet::reciprocal_series({1.0, -static_cast<double>(p)}, order), order);
    denom_sq = mul(denom_sq, denom_sq, order);
    const auto local = mul(mul(numer, numer, order), denom_sq, order);
    std::int64_t idx = 1;
    for (int m = 1; m <= order; ++m) {
      idx *= p * p;
      if (idx > c.limit) break;
      CHECK(c.at(idx) == doctest::Approx(local[static_cast<std::size_t>(m)]).epsilon(1e-11));
    }
  }
}

TEST_CASE("deterministic families") {
  // k = 0 collapses to zeta(2s)^2 zeta(2s-1)^2
  const auto d0 = stochastic::d1k_coeffs(0, 10'000);
  const auto zeta2 = dirichlet::convolve(CoeffSeries::ones(100), CoeffSeries::ones(100));
  const auto zs = dirichlet::convolve(CoeffSeries::shifted_zeta(100),
                                      CoeffSeries::shifted_zeta(100));
  const auto expected = dirichlet::convolve(dirichlet::square_support(zeta2, 10'000),
                                            dirichlet::square_support(zs, 10'000));
  for (std::int64_t n = 1; n <= 10'000; ++n) {
    CHECK(d0.at(n) == doctest::Approx(expected.at(n)).epsilon(1e-11));
  }
  CHECK(d0.at(1) == 1.0);

  // The omega = 1 random product (S empty) carries the squared quadratic
  // numerator (1 - sqrt(p) v)^4 per prime, i.e. exactly the k = 2 family.
  const auto d2 = stochastic::d1k_coeffs(2, 10'000);
  stochastic::OmegaSample flat;
  flat.bound = 120;
  for (std::int32_t p : dirichlet::primes_up_to(120)) flat.angles[p] = 0.0;
  const auto cw = stochastic::d_omega_coeffs(flat, 10'000);
  for (std::int64_t n = 1; n <= 10'000; ++n) {
    CHECK(d2.at(n) == doctest::Approx(cw.at(n)).epsilon(1e-9));
  }
}

TEST_CASE("quadratic character spot checks") {
  CHECK(stochastic::kronecker_at_prime(-4, 3) == -1);
  CHECK(stochastic::kronecker_at_prime(-4, 5) == 1);
  CHECK(stochastic::kronecker_at_prime(-4, 2) == 0);
  CHECK(stochastic::kronecker_at_prime(5, 5) == 0);
  CHECK(stochastic::kronecker_at_prime(8, 7) == 1);   // 8 = 1 mod 7, square
  CHECK(stochastic::kronecker_at_prime(-3, 7) == 1);  // 4 is a square mod 7
  CHECK(stochastic::is_fundamental_discriminant(1));
  CHECK(stochastic::is_fundamental_discriminant(5));
  CHECK(stochastic::is_fundamental_discriminant(8));
  CHECK(stochastic::is_fundamental_discriminant(-3));
  CHECK(stochastic::is_fundamental_discriminant(-4));
  CHECK(stochastic::is_fundamental_discriminant(12));
  CHECK(stochastic::is_fundamental_discriminant(-8));
  CHECK_FALSE(stochastic::is_fundamental_discriminant(9));
  CHECK_FALSE(stochastic::is_fundamental_discriminant(-6));
  CHECK_FALSE(stochastic::is_fundamental_discriminant(0));
  CHECK_FALSE(stochastic::is_fundamental_discriminant(2));
}

TEST_CASE("dchik coefficients") {
  CHECK_THROWS_AS(stochastic::dchik_coeffs(9, 1, 100), std::domain_error);
  CHECK_THROWS_AS(stochastic::dchik_coeffs(-6, 1, 100), std::domain_error);
  // d = 1 reduces to d1k exactly
  const auto a = stochastic::dchik_coeffs(1, 2, 5000);
  const auto b = stochastic::d1k_coeffs(2, 5000);
  for (std::int64_t n = 1; n <= 5000; ++n) CHECK(a.at(n) == b.at(n));
  // chi(2) = 0 for d = -4: the local factor at 2 is the bare zeta part
  const auto cm4 = stochastic::dchik_coeffs(-4, 3, 1000);
  const auto bare = stochastic::d1k_coeffs(0, 1000);
  CHECK(cm4.at(4) == doctest::Approx(bare.at(4)));
  CHECK(cm4.at(16) == doctest::Approx(bare.at(16)));
}

TEST_CASE("nonnegativity of the deterministic families up to k = 2") {
  // For k <= 2 the local factor is a perfect square of a positive-coefficient
  // series, so every coefficient is nonnegative.
  for (int k = 0; k <= 2; ++k) {
    const auto s = stochastic::d1k_coeffs(k, 10'000);
    for (std::int64_t n = 1; n <= s.limit; ++n) {
      CHECK(s.at(n) >= 0.0);
    }
  }
  for (std::int64_t d = -40; d <= 40; ++d) {
    if (!stochastic::is_fundamental_discriminant(d)) continue;
    for (int k = 1; k <= 2; ++k) {
      const auto s = stochastic::dchik_coeffs(d, k, 10'000);
      for (std::int64_t n = 1; n <= s.limit; ++n) {
        if (!(s.at(n) >= 0.0)) {
          CAPTURE(d);
          CAPTURE(k);
          CAPTURE(n);
          CHECK(s.at(n) >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("k = 3 families genuinely go negative") {
  // Pinned counterexample: the local coefficient of v at p is
  // 2 + 2p - 2k sqrt(p), which is 6 - 6 sqrt(2) < 0 for k = 3, p = 2.
  const auto d3 = stochastic::d1k_coeffs(3, 100);
  CHECK(d3.at(4) == doctest::Approx(6.0 - 6.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(d3.at(4) < 0.0);
  // chi(2) = -1 flips the sign at p = 2 back to positive...
  const auto cm8 = stochastic::dchik_coeffs(-8, 3, 100);  // chi_{-8}(2) = 0 actually removes it
  CHECK(cm8.at(4) >= 0.0);
  // ...but any chi with chi(3) = +1 goes negative at 9: 8 - 6 sqrt(3) < 0.
  const auto c40 = stochastic::dchik_coeffs(40, 3, 100);  // 40 = 1 mod 3
  CHECK(c40.at(9) == doctest::Approx(8.0 - 6.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(c40.at(9) < 0.0);
}

TEST_CASE("batch sign study") {
  stochastic::BatchConfig cfg;
  cfg.num_samples = 0;
  auto empty = stochastic::batch_sign_study(cfg);
  CHECK(empty.num_samples == 0);
  CHECK(empty.first_change_quantiles.empty());

  cfg.prime_bound = 110;
  cfg.coeff_limit = 4000;
  cfg.num_samples = 6;
  cfg.seed = 99;
  cfg.x_lo = 0.08;
  cfg.x_hi = 1.0;
  cfg.grid_points = 24;
  cfg.plan.alpha = 0.9;
  cfg.plan.beta = 10.0;
  const auto s1 = stochastic::batch_sign_study(cfg);
  CHECK(s1.nonneg_violations == 0);
  CHECK(s1.num_samples == 6);
  const auto s2 = stochastic::batch_sign_study(cfg);
  CHECK(s1.to_json() == s2.to_json());
  cfg.threads = 4;
  const auto s3 = stochastic::batch_sign_study(cfg);
  CHECK(s1.to_json() == s3.to_json());
}
