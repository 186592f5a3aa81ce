#include "bterm/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bterm/constants.hpp"
#include "bterm/dd.hpp"
#include "bterm/parallel.hpp"

#include <json.hpp>

namespace bterm::stochastic {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Angle derived from (seed, p) alone, independent of draw order.
double angle_for(std::uint64_t seed, std::int64_t p) {
  const std::uint64_t z = splitmix64(seed ^ (static_cast<std::uint64_t>(p) * 0x9e3779b97f4a7c15ULL));
  return 2.0 * kPi * (static_cast<double>(z >> 11) * 0x1p-53);
}

int local_order(std::int64_t p, std::int64_t n) {
  // largest m with p^{2m} <= n
  int m = 0;
  std::int64_t pk = 1;
  const std::int64_t p2 = p * p;
  while (pk <= n / p2) {
    pk *= p2;
    ++m;
  }
  return m;
}

// Nonnegative local building block for the random product at p (variable
// v = u^2): either sum_{m>=0} S_m v^m (p excluded, pure zeta part) or
// 1 + (p + 1 - 2 sqrt(p) Re omega) sum_{m>=1} S_{m-1} v^m, where
// S_m = 1 + p + ... + p^m.  Every term is nonnegative, so no cancellation
// can produce a spurious negative; squaring preserves that.
std::vector<dd> omega_local_base(std::int64_t p, bool excluded, double two_re, int order) {
  std::vector<dd> base(static_cast<std::size_t>(order) + 1, dd{0.0});
  base[0] = dd{1.0};
  dd s_running{1.0};  // S_0
  dd p_pow{1.0};
  if (excluded) {
    for (int m = 1; m <= order; ++m) {
      p_pow = p_pow * dd{static_cast<double>(p)};
      s_running = s_running + p_pow;
      base[static_cast<std::size_t>(m)] = s_running;
    }
  } else {
    const dd mult = dd{static_cast<double>(p) + 1.0} - dd_sqrt(static_cast<double>(p)) * two_re;
    if (mult.hi < 0.0) {
      throw std::runtime_error("omega local multiplier negative at p=" + std::to_string(p));
    }
    for (int m = 1; m <= order; ++m) {
      base[static_cast<std::size_t>(m)] = mult * s_running;  // mult * S_{m-1}
      p_pow = p_pow * dd{static_cast<double>(p)};
      s_running = s_running + p_pow;
    }
  }
  return base;
}

std::vector<dd> square_series(const std::vector<dd>& a) {
  std::vector<dd> c(a.size(), dd{0.0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < a.size(); ++j) {
      c[i + j] = c[i + j] + a[i] * a[j];
    }
  }
  return c;
}

// Exact arithmetic in Z[sqrt(p)] for the deterministic families.
struct QuadInt {
  long long a = 0;  // rational part
  long long b = 0;  // coefficient of sqrt(p)
};

QuadInt qmul(const QuadInt& x, const QuadInt& y, long long p) {
  return {x.a * y.a + p * x.b * y.b, x.a * y.b + x.b * y.a};
}

std::vector<QuadInt> qmul_series(const std::vector<QuadInt>& a, const std::vector<QuadInt>& b,
                                 long long p) {
  std::vector<QuadInt> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < a.size(); ++j) {
      const QuadInt t = qmul(a[i], b[j], p);
      c[i + j].a += t.a;
      c[i + j].b += t.b;
    }
  }
  return c;
}

// Local series of (1 - chi sqrt(p) v)^{2k} / ((1-v)(1-pv))^2 in Z[sqrt p],
// chi in {-1, 0, +1}.  Numerator expanded by binomial, denominator by the
// S_m convolution square.
std::vector<QuadInt> dchik_local(std::int64_t p, int chi, int k, int order) {
  const std::size_t len = static_cast<std::size_t>(order) + 1;
  // ((1-v)(1-pv))^{-2} = (sum S_m v^m)^2
  std::vector<QuadInt> denom(len);
  {
    long long s = 1, ppow = 1;
    for (int m = 0; m <= order; ++m) {
      if (m > 0) {
        ppow *= p;
        s += ppow;
      }
      denom[static_cast<std::size_t>(m)] = {s, 0};
    }
    denom = qmul_series(denom, denom, p);
  }
  if (chi == 0 || k == 0) return denom;
  // (1 - chi sqrt(p) v)^{2k}: binomial coefficients with (chi sqrt p)^j.
  std::vector<QuadInt> numer(len);
  long long binom = 1;
  for (int j = 0; j <= 2 * k && j <= order; ++j) {
    long long pj_half = 1;
    for (int i = 0; i + 1 < j; i += 2) pj_half *= p;  // p^{floor(j/2)}
    const long long sign = (j % 2 == 0) ? 1 : -1;
    const long long chij = (chi == 1 || j % 2 == 0) ? 1 : -1;
    if (j % 2 == 0) {
      numer[static_cast<std::size_t>(j)].a = sign * chij * binom * pj_half;
    } else {
      numer[static_cast<std::size_t>(j)].b = sign * chij * binom * pj_half;
    }
    binom = binom * (2 * k - j) / (j + 1);
  }
  return qmul_series(numer, denom, p);
}

dirichlet::CoeffSeries assemble_square_supported(
    const std::function<std::vector<double>(std::int64_t)>& local_at, std::int64_t n,
    const std::string& label) {
  std::map<std::int64_t, std::vector<double>> locals;
  for (std::int32_t p : dirichlet::primes_up_to(static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))) + 1)) {
    if (static_cast<std::int64_t>(p) * p > n) break;
    const std::vector<double> lv = local_at(p);  // coefficients at v^m = p^{2m}
    std::vector<double> expanded(2 * (lv.size() - 1) + 1, 0.0);
    for (std::size_t m = 0; m < lv.size(); ++m) expanded[2 * m] = lv[m];
    locals[p] = std::move(expanded);
  }
  return dirichlet::assemble_local_series(locals, n, label);
}

void check_nonnegative_local(std::int64_t p, const std::vector<double>& lv) {
  for (std::size_t m = 0; m < lv.size(); ++m) {
    if (lv[m] < 0.0) {
      throw std::runtime_error("nonnegativity violated in local factor at p=" + std::to_string(p) +
                               ", nu=p^" + std::to_string(2 * m));
    }
  }
}

}  // namespace

double OmegaSample::two_re(std::int64_t p) const {
  const auto it = angles.find(p);
  if (it == angles.end()) throw std::out_of_range("omega: no angle for p=" + std::to_string(p));
  return 2.0 * std::cos(it->second);
}

OmegaSample sample_omega(const std::set<std::int64_t>& excluded, std::int64_t bound,
                         std::uint64_t seed) {
  if (bound < 2) throw std::invalid_argument("sample_omega: bound must be >= 2");
  OmegaSample s;
  s.excluded = excluded;
  s.seed = seed;
  s.bound = bound;
  for (std::int32_t p : dirichlet::primes_up_to(bound)) {
    if (p > bound) break;
    if (excluded.count(p)) continue;
    s.angles[p] = angle_for(seed, p);
  }
  return s;
}

dirichlet::CoeffSeries d_omega_coeffs(const OmegaSample& omega, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("d_omega_coeffs: n must be >= 1");
  // Every prime with p^2 <= n must carry an angle (or be excluded).
  for (std::int32_t p : dirichlet::primes_up_to(n)) {
    if (static_cast<std::int64_t>(p) * p > n) break;
    if (!omega.excluded.count(p) && p > omega.bound) {
      throw std::invalid_argument("d_omega_coeffs: omega bound " + std::to_string(omega.bound) +
                                  " too small for limit " + std::to_string(n));
    }
  }
  auto local_at = [&omega, n](std::int64_t p) {
    const bool excluded = omega.excluded.count(p) > 0;
    const int order = local_order(p, n);
    const std::vector<dd> base =
        omega_local_base(p, excluded, excluded ? 0.0 : omega.two_re(p), order);
    const std::vector<dd> squared = square_series(base);
    std::vector<double> out(squared.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = squared[i].to_double();
    check_nonnegative_local(p, out);
    return out;
  };
  dirichlet::CoeffSeries c = assemble_square_supported(local_at, n, "D_omega");
  return c;
}

dirichlet::CoeffSeries d1k_coeffs(int k, std::int64_t n) {
  return dchik_coeffs(1, k, n);
}

dirichlet::CoeffSeries dchik_coeffs(std::int64_t d, int k, std::int64_t n) {
  if (!is_fundamental_discriminant(d)) {
    throw std::domain_error("dchik_coeffs: " + std::to_string(d) +
                            " is not a fundamental discriminant");
  }
  if (k < 0 || k > 6) throw std::invalid_argument("dchik_coeffs: k out of supported range [0,6]");
  if (n < 1) throw std::invalid_argument("dchik_coeffs: n must be >= 1");
  auto local_at = [d, k, n](std::int64_t p) {
    const int chi = kronecker_at_prime(d, p);
    const int order = local_order(p, n);
    const std::vector<QuadInt> exact = dchik_local(p, chi, k, order);
    const double sp = std::sqrt(static_cast<double>(p));
    std::vector<double> out(exact.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      // exact zero stays exactly zero; nonzero values are bounded away from 0
      out[i] = (exact[i].a == 0 && exact[i].b == 0)
                   ? 0.0
                   : static_cast<double>(exact[i].a) + static_cast<double>(exact[i].b) * sp;
    }
    return out;
  };
  const std::string label = (d == 1) ? "D_{1," + std::to_string(k) + "}"
                                     : "D_{chi(" + std::to_string(d) + ")," + std::to_string(k) + "}";
  return assemble_square_supported(local_at, n, label);
}

int kronecker_at_prime(std::int64_t d, std::int64_t p) {
  if (p == 2) {
    if (d % 2 == 0) return 0;
    const std::int64_t r = ((d % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
  }
  std::int64_t r = ((d % p) + p) % p;
  if (r == 0) return 0;
  // Euler's criterion
  std::int64_t result = 1, base = r, e = (p - 1) / 2;
  while (e > 0) {
    if (e & 1) result = (__int128)result * base % p;
    base = (__int128)base * base % p;
    e >>= 1;
  }
  return result == 1 ? 1 : -1;
}

bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 1) return true;
  if (d == 0) return false;
  auto squarefree = [](std::int64_t v) {
    v = std::abs(v);
    for (std::int64_t q = 2; q * q <= v; ++q) {
      if (v % (q * q) == 0) return false;
    }
    return true;
  };
  const std::int64_t mod4 = ((d % 4) + 4) % 4;
  if (mod4 == 1) return squarefree(d);
  if (mod4 == 0) {
    const std::int64_t m = d / 4;
    const std::int64_t m4 = ((m % 4) + 4) % 4;
    return (m4 == 2 || m4 == 3) && squarefree(m);
  }
  return false;
}

std::string BatchSummary::to_json() const {
  nlohmann::json j;
  j["num_samples"] = num_samples;
  j["seed"] = seed;
  j["nonneg_violations"] = nonneg_violations;
  j["no_sign_change_fraction"] = no_sign_change_fraction;
  j["first_change_quantiles"] = first_change_quantiles;
  j["samples_with_change"] = samples_with_change;
  return j.dump();
}

BatchSummary batch_sign_study(const BatchConfig& config) {
  BatchSummary summary;
  summary.num_samples = config.num_samples;
  summary.seed = config.seed;
  if (config.num_samples == 0) return summary;
  if (config.coeff_limit < 1 || config.prime_bound < 2) {
    throw std::invalid_argument("batch_sign_study: need coeff_limit >= 1 and prime_bound >= 2");
  }
  zseries::TruncationPlan plan = config.plan;
  if (plan.T <= 0.0) plan.T = static_cast<double>(config.coeff_limit);

  struct PerSample {
    bool has_change = false;
    double first_change = 0.0;
  };
  std::vector<PerSample> results(static_cast<std::size_t>(config.num_samples));

  parallel_for(config.num_samples, config.threads, [&](std::int64_t i) {
    const std::uint64_t sample_seed = splitmix64(config.seed + 0x9e3779b97f4a7c15ULL * (i + 1));
    const OmegaSample omega = sample_omega(config.excluded, config.prime_bound, sample_seed);
    const dirichlet::CoeffSeries c = d_omega_coeffs(omega, config.coeff_limit);
    for (std::int64_t nu = 1; nu <= c.limit; ++nu) {
      if (c.at(nu) < 0.0) {
        std::int64_t p = 2;
        while (nu % p != 0) ++p;
        throw std::runtime_error("batch_sign_study: negative coefficient at nu=" +
                                 std::to_string(nu) + " (p=" + std::to_string(p) + ")");
      }
    }
    const zseries::ZE0Evaluator eval(dirichlet::a_weights(c), plan);
    const auto report = zseries::sign_scan(
        [&eval](double x) {
          const auto v = eval(x);
          return std::make_pair(-v.value, v.bound);
        },
        config.x_lo, config.x_hi, config.grid_points, 1);
    PerSample& out = results[static_cast<std::size_t>(i)];
    out.has_change = !report.sign_change_brackets.empty();
    if (out.has_change) {
      const auto& [lo, hi] = report.sign_change_brackets.front();
      out.first_change = std::sqrt(lo * hi);
    }
  });

  std::vector<double> changes;
  for (const auto& r : results) {
    if (r.has_change) changes.push_back(r.first_change);
  }
  summary.samples_with_change = static_cast<std::int64_t>(changes.size());
  summary.no_sign_change_fraction =
      1.0 - static_cast<double>(changes.size()) / static_cast<double>(config.num_samples);
  if (!changes.empty()) {
    std::sort(changes.begin(), changes.end());
    for (double q : {0.10, 0.25, 0.50, 0.75, 0.90}) {
      const double pos = q * static_cast<double>(changes.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, changes.size() - 1);
      const double frac = pos - static_cast<double>(lo);
      summary.first_change_quantiles.push_back(changes[lo] * (1.0 - frac) + changes[hi] * frac);
    }
  }
  return summary;
}

}  // namespace bterm::stochastic
