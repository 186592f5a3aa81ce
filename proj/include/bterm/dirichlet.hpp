#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace bterm::dirichlet {

// Truncated Dirichlet-series coefficient sequence: values[n] is the
// coefficient of n^{-s}, 1 <= n <= limit.  Exact for all indices up to the
// truncation limit; tail control is the caller's business.
struct CoeffSeries {
  std::int64_t limit = 0;
  std::vector<double> values;  // size limit + 1, index 0 unused
  std::string label;
  bool multiplicative = false;
  bool integral = false;  // all entries known to be exact integers

  double at(std::int64_t n) const { return values[static_cast<std::size_t>(n)]; }
  double& at(std::int64_t n) { return values[static_cast<std::size_t>(n)]; }

  static CoeffSeries zeros(std::int64_t limit, std::string label = {});
  // coefficients of zeta: all ones
  static CoeffSeries ones(std::int64_t limit);
  // coefficients of zeta(s-1): values[n] = n
  static CoeffSeries shifted_zeta(std::int64_t limit);
  // Kronecker delta at 1 (multiplicative identity)
  static CoeffSeries delta1(std::int64_t limit);
  // divisor function sigma0 = zeta * zeta
  static CoeffSeries sigma0(std::int64_t limit);

  // Exhaustive scan of values[mn] = values[m]*values[n] over coprime pairs.
  bool check_multiplicative(double tol = 0.0) const;
};

// Per-prime Euler factor data: each local factor is a polynomial in
// u = p^{-s} with constant term exactly 1 and degree <= max_degree.
struct EulerFactorMap {
  std::map<std::int64_t, std::vector<double>> local;  // explicit factors
  // Factor for primes not listed above; empty function means factor 1.
  std::function<std::vector<double>(std::int64_t)> fallback;
  int max_degree = 4;
};

// Shared prime sieve, cached per process (read-only after construction).
const std::vector<std::int32_t>& primes_up_to(std::int64_t n);

// Dirichlet convolution c[n] = sum_{d|n} a[d] b[n/d]; O(N log N).
CoeffSeries convolve(const CoeffSeries& a, const CoeffSeries& b);

// Expand prod_p f_p(p^{-s})^{+-1} into coefficients up to N.  With invert
// set, each local polynomial is replaced by its power-series reciprocal to
// order log_p N before multiplicative assembly.
CoeffSeries euler_expand(const EulerFactorMap& factors, std::int64_t n, bool invert,
                         std::string label = {});

// Multiplicative assembly of precomputed local coefficient series: for each
// prime p, local[k] is the coefficient at p^k (local[0] must be 1).  Primes
// not in the map contribute the trivial factor.
CoeffSeries assemble_local_series(
    const std::map<std::int64_t, std::vector<double>>& locals, std::int64_t n,
    std::string label = {});

// Support relocation n -> n^2: c[m^2] = a[m].
CoeffSeries square_support(const CoeffSeries& a, std::int64_t n);

// Support relocation n -> q^2 n: c[q^2 m] = a[m].
CoeffSeries shift_support(const CoeffSeries& a, std::int64_t q, std::int64_t n);

// Divisor-weighted sums a[n] = sum_{d|n} c[d] sigma0(n/d).
CoeffSeries a_weights(const CoeffSeries& c);

// Power-series reciprocal of a polynomial with constant term 1, to the given
// order (inclusive).
std::vector<double> reciprocal_series(const std::vector<double>& poly, int order);

// CSV export/import: `index,value` header, one row per nonzero entry,
// 17-significant-digit decimals (exact double round trip).  Lines starting
// with '#' are metadata and are skipped on read.
void write_csv(std::ostream& os, const CoeffSeries& s,
               const std::vector<std::pair<std::string, std::string>>& metadata = {});
CoeffSeries read_csv(std::istream& is);

}  // namespace bterm::dirichlet
