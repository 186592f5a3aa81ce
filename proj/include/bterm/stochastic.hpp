#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bterm/dirichlet.hpp"
#include "bterm/zseries.hpp"

namespace bterm::stochastic {

// Seeded assignment p -> angle on the unit circle for the primes outside the
// excluded set S, up to the bound P.  Angles are derived per prime from the
// seed (not from draw order), so samples are identical across runs and
// thread counts.
struct OmegaSample {
  std::set<std::int64_t> excluded;
  std::map<std::int64_t, double> angles;  // in [0, 2pi)
  std::uint64_t seed = 0;
  std::int64_t bound = 0;

  // 2 Re omega(p) = 2 cos(angle)
  double two_re(std::int64_t p) const;
};

OmegaSample sample_omega(const std::set<std::int64_t>& excluded, std::int64_t bound,
                         std::uint64_t seed);

// Coefficients of the random degree-two Euler-product series: local factor
//   (1-u^2)^{-2} (1-p u^2)^{-2} (1 - 2 Re(omega(p)) sqrt(p) u^2 + p u^4)^2
// for p outside S, and (1-u^2)^{-2}(1-p u^2)^{-2} for p in S.  Expansion is
// carried in double-double through the manifestly nonnegative local series
//   [1 + (p + 1 - 2 sqrt(p) Re omega(p)) sum_{n>=1} (sum_{k<n} p^k) u^{2n}]^2.
dirichlet::CoeffSeries d_omega_coeffs(const OmegaSample& omega, std::int64_t n);

// Deterministic families: local factors
//   (1-u^2)^{-2} (1-p u^2)^{-2} (1 - sqrt(p) u^2)^{2k}          (d1k)
//   (1-u^2)^{-2} (1-p u^2)^{-2} (1 - chi(p) sqrt(p) u^2)^{2k}   (dchik)
// with chi the quadratic character of fundamental discriminant d.
dirichlet::CoeffSeries d1k_coeffs(int k, std::int64_t n);
dirichlet::CoeffSeries dchik_coeffs(std::int64_t d, int k, std::int64_t n);

// Kronecker symbol (d|p) for prime p (chi(p) in {-1,0,1}).
int kronecker_at_prime(std::int64_t d, std::int64_t p);
bool is_fundamental_discriminant(std::int64_t d);

struct BatchSummary {
  std::int64_t num_samples = 0;
  std::uint64_t seed = 0;
  std::int64_t nonneg_violations = 0;  // any violation aborts, so 0 on success
  double no_sign_change_fraction = 0.0;
  // 10/25/50/75/90% quantiles of the first sign-change bracket midpoint,
  // over samples that have at least one certified change.
  std::vector<double> first_change_quantiles;
  std::int64_t samples_with_change = 0;
  std::string to_json() const;
};

struct BatchConfig {
  std::set<std::int64_t> excluded;
  std::int64_t prime_bound = 0;   // P
  std::int64_t coeff_limit = 0;   // N
  std::int64_t num_samples = 0;
  double x_lo = 0.05, x_hi = 1.0;
  int grid_points = 40;
  std::uint64_t seed = 0;
  int threads = 1;
  zseries::TruncationPlan plan{};  // plan.T defaults to coeff_limit when 0
};

// For each seeded omega sample: build c_omega, assert nonnegativity (a
// violation aborts with the offending prime/index), run the certified sign
// scan of the attached Z, and aggregate.
BatchSummary batch_sign_study(const BatchConfig& config);

}  // namespace bterm::stochastic
