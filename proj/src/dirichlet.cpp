#include "bterm/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bterm::dirichlet {

namespace {

void require_limit(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("CoeffSeries limit must be >= 1");
}

}  // namespace

CoeffSeries CoeffSeries::zeros(std::int64_t limit, std::string label) {
  require_limit(limit);
  CoeffSeries s;
  s.limit = limit;
  s.values.assign(static_cast<std::size_t>(limit) + 1, 0.0);
  s.label = std::move(label);
  return s;
}

CoeffSeries CoeffSeries::ones(std::int64_t limit) {
  CoeffSeries s = zeros(limit, "zeta");
  std::fill(s.values.begin() + 1, s.values.end(), 1.0);
  s.multiplicative = true;
  s.integral = true;
  return s;
}

CoeffSeries CoeffSeries::shifted_zeta(std::int64_t limit) {
  CoeffSeries s = zeros(limit, "zeta(s-1)");
  for (std::int64_t n = 1; n <= limit; ++n) s.at(n) = static_cast<double>(n);
  s.multiplicative = true;
  s.integral = true;
  return s;
}

CoeffSeries CoeffSeries::delta1(std::int64_t limit) {
  CoeffSeries s = zeros(limit, "delta1");
  s.at(1) = 1.0;
  s.multiplicative = true;
  s.integral = true;
  return s;
}

CoeffSeries CoeffSeries::sigma0(std::int64_t limit) {
  CoeffSeries s = zeros(limit, "sigma0");
  for (std::int64_t d = 1; d <= limit; ++d) {
    for (std::int64_t n = d; n <= limit; n += d) s.at(n) += 1.0;
  }
  s.multiplicative = true;
  s.integral = true;
  return s;
}

bool CoeffSeries::check_multiplicative(double tol) const {
  if (limit < 1 || at(1) != 1.0) return false;
  for (std::int64_t m = 2; m * 2 <= limit; ++m) {
    for (std::int64_t n = m + 1; m * n <= limit; ++n) {
      if (std::gcd(m, n) != 1) continue;
      if (std::abs(at(m * n) - at(m) * at(n)) > tol) return false;
    }
  }
  return true;
}

const std::vector<std::int32_t>& primes_up_to(std::int64_t n) {
  static std::mutex mu;
  // Snapshots are kept alive forever so references handed out earlier stay
  // valid when the sieve has to grow.
  static std::vector<std::unique_ptr<std::vector<std::int32_t>>> snapshots;
  static std::int64_t cached_bound = 0;
  std::lock_guard<std::mutex> lock(mu);
  if (n > cached_bound || snapshots.empty()) {
    const std::int64_t bound = std::max<std::int64_t>({n, 2 * cached_bound, 1000});
    std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
    auto fresh = std::make_unique<std::vector<std::int32_t>>();
    for (std::int64_t p = 2; p <= bound; ++p) {
      if (composite[static_cast<std::size_t>(p)]) continue;
      fresh->push_back(static_cast<std::int32_t>(p));
      for (std::int64_t m = p * p; m <= bound; m += p) composite[static_cast<std::size_t>(m)] = true;
    }
    snapshots.push_back(std::move(fresh));
    cached_bound = bound;
  }
  // Trailing primes beyond a caller's n are harmless: every user re-checks
  // p <= n.
  return *snapshots.back();
}

CoeffSeries convolve(const CoeffSeries& a, const CoeffSeries& b) {
  if (a.limit != b.limit) throw std::invalid_argument("convolve: mismatched limits");
  CoeffSeries c = CoeffSeries::zeros(a.limit, a.label + "*" + b.label);
  const std::int64_t n = a.limit;
  for (std::int64_t d = 1; d <= n; ++d) {
    const double ad = a.at(d);
    if (ad == 0.0) continue;
    for (std::int64_t e = 1; d * e <= n; ++e) {
      c.at(d * e) += ad * b.at(e);
    }
  }
  c.multiplicative = a.multiplicative && b.multiplicative;
  c.integral = a.integral && b.integral;
  return c;
}

std::vector<double> reciprocal_series(const std::vector<double>& poly, int order) {
  if (poly.empty() || poly[0] != 1.0) {
    throw std::invalid_argument("reciprocal_series: constant term must be 1");
  }
  std::vector<double> b(static_cast<std::size_t>(order) + 1, 0.0);
  b[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    double acc = 0.0;
    const int jmax = std::min<int>(k, static_cast<int>(poly.size()) - 1);
    for (int j = 1; j <= jmax; ++j) acc += poly[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
    b[static_cast<std::size_t>(k)] = -acc;
  }
  return b;
}

namespace {

// Distribute a local series (coefficients at powers of p) into the global
// array.  Indices divisible by p hold zero before their prime is processed,
// so in-place accumulation over p-free bases is safe.
void fold_local_series(CoeffSeries& out, std::int64_t p, const std::vector<double>& loc,
                       std::int64_t n) {
  const int kmax = static_cast<int>(loc.size()) - 1;
  for (std::int64_t m = 1; m <= n / p; ++m) {
    if (m % p == 0) continue;
    const double base = out.at(m);
    if (base == 0.0) continue;
    std::int64_t idx = m;
    for (int k = 1; k <= kmax; ++k) {
      if (idx > n / p) break;
      idx *= p;
      if (loc[static_cast<std::size_t>(k)] != 0.0) {
        out.at(idx) += loc[static_cast<std::size_t>(k)] * base;
      }
    }
  }
}

}  // namespace

CoeffSeries euler_expand(const EulerFactorMap& factors, std::int64_t n, bool invert,
                         std::string label) {
  require_limit(n);
  CoeffSeries out = CoeffSeries::delta1(n);
  out.label = label.empty() ? std::string("euler_expand") : std::move(label);
  const auto& primes = primes_up_to(n);
  for (std::int32_t p : primes) {
    if (p > n) break;
    std::vector<double> f;
    if (auto it = factors.local.find(p); it != factors.local.end()) {
      f = it->second;
    } else if (factors.fallback) {
      f = factors.fallback(p);
    } else {
      continue;  // factor 1
    }
    if (f.empty() || f[0] != 1.0) {
      throw std::invalid_argument("euler_expand: local factor at p=" + std::to_string(p) +
                                  " must have constant term 1");
    }
    if (static_cast<int>(f.size()) - 1 > factors.max_degree) {
      throw std::invalid_argument("euler_expand: local factor degree exceeds bound at p=" +
                                  std::to_string(p));
    }
    int kmax = 0;
    std::int64_t pk = 1;
    while (pk <= n / p) {
      pk *= p;
      ++kmax;
    }
    std::vector<double> loc;
    if (invert) {
      loc = reciprocal_series(f, kmax);
    } else {
      loc = f;
      loc.resize(static_cast<std::size_t>(kmax) + 1, 0.0);
    }
    fold_local_series(out, p, loc, n);
  }
  out.multiplicative = true;
  out.integral = false;
  return out;
}

CoeffSeries assemble_local_series(
    const std::map<std::int64_t, std::vector<double>>& locals, std::int64_t n,
    std::string label) {
  require_limit(n);
  CoeffSeries out = CoeffSeries::delta1(n);
  out.label = label.empty() ? std::string("local-series product") : std::move(label);
  for (const auto& [p, loc] : locals) {
    if (p < 2 || p > n) continue;
    if (loc.empty() || loc[0] != 1.0) {
      throw std::invalid_argument("assemble_local_series: local series at p=" +
                                  std::to_string(p) + " must start with 1");
    }
    fold_local_series(out, p, loc, n);
  }
  out.multiplicative = true;
  out.integral = false;
  return out;
}

CoeffSeries square_support(const CoeffSeries& a, std::int64_t n) {
  require_limit(n);
  CoeffSeries c = CoeffSeries::zeros(n, a.label + " on squares");
  for (std::int64_t m = 1; m * m <= n && m <= a.limit; ++m) {
    c.at(m * m) = a.at(m);
  }
  c.multiplicative = a.multiplicative;
  c.integral = a.integral;
  return c;
}

CoeffSeries shift_support(const CoeffSeries& a, std::int64_t q, std::int64_t n) {
  require_limit(n);
  if (q < 1) throw std::invalid_argument("shift_support: q must be >= 1");
  CoeffSeries c = CoeffSeries::zeros(n, a.label + " shifted");
  const std::int64_t q2 = q * q;
  for (std::int64_t m = 1; m <= a.limit && m <= n / q2; ++m) {
    c.at(q2 * m) = a.at(m);
  }
  c.multiplicative = (q == 1) && a.multiplicative;
  c.integral = a.integral;
  return c;
}

CoeffSeries a_weights(const CoeffSeries& c) {
  CoeffSeries s0 = CoeffSeries::sigma0(c.limit);
  CoeffSeries a = convolve(c, s0);
  a.label = "a_weights(" + c.label + ")";
  return a;
}

void write_csv(std::ostream& os, const CoeffSeries& s,
               const std::vector<std::pair<std::string, std::string>>& metadata) {
  for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
  os << "index,value\n";
  char buf[64];
  for (std::int64_t n = 1; n <= s.limit; ++n) {
    if (s.at(n) == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n", static_cast<long long>(n), s.at(n));
    os << buf;
  }
}

CoeffSeries read_csv(std::istream& is) {
  std::string line;
  std::vector<std::pair<std::int64_t, double>> rows;
  std::int64_t max_index = 1;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("index,", 0) != 0) throw std::runtime_error("read_csv: missing header");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::int64_t idx = 0;
    char comma = 0;
    double val = 0.0;
    if (!(ss >> idx >> comma >> val) || comma != ',') {
      throw std::runtime_error("read_csv: bad row: " + line);
    }
    rows.emplace_back(idx, val);
    max_index = std::max(max_index, idx);
  }
  CoeffSeries s = CoeffSeries::zeros(max_index, "csv");
  for (const auto& [idx, val] : rows) s.at(idx) = val;
  return s;
}

}  // namespace bterm::dirichlet
