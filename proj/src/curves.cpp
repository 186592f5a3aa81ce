#include "bterm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "bterm/constants.hpp"
#include "bterm/dd.hpp"

#include <json.hpp>

namespace bterm::curves {

namespace {

using dirichlet::CoeffSeries;
using dirichlet::EulerFactorMap;

std::int64_t mod_reduce(std::int64_t v, std::int64_t p) {
  std::int64_t r = v % p;
  return r < 0 ? r + p : r;
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

// chi[t] = Legendre symbol (t|p) + 1 stored in a byte table: 0 -> -1, 1 -> 0, 2 -> +1.
std::vector<signed char> legendre_table(std::int64_t p) {
  std::vector<signed char> chi(static_cast<std::size_t>(p), -1);
  chi[0] = 0;
  for (std::int64_t x = 1; x <= (p - 1) / 2; ++x) {
    chi[static_cast<std::size_t>((x * x) % p)] = 1;
  }
  return chi;
}

// Affine point count over F_2 and F_3 by brute force on the original model.
std::int64_t count_points_brute(const EllipticCurve& e, std::int64_t p) {
  std::int64_t affine = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    for (std::int64_t y = 0; y < p; ++y) {
      const std::int64_t lhs = y * y + e.a1 * x * y + e.a3 * y;
      const std::int64_t rhs = x * x * x + e.a2 * x * x + e.a4 * x + e.a6;
      if (mod_reduce(lhs - rhs, p) == 0) ++affine;
    }
  }
  return affine + 1;
}

// a_p = -sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6) for odd good p.
std::int64_t ap_char_sum(const EllipticCurve& e, std::int64_t p) {
  const auto chi = legendre_table(p);
  const std::int64_t c3 = 4 % p;
  const std::int64_t c2 = mod_reduce(e.b2(), p);
  const std::int64_t c1 = mod_reduce(2 * e.b4(), p);
  const std::int64_t c0 = mod_reduce(e.b6(), p);
  std::int64_t sum = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    const std::int64_t fx = (((c3 * x + c2) % p * x + c1) % p * x + c0) % p;
    sum += chi[static_cast<std::size_t>(fx)];
  }
  return -sum;
}

ReductionInfo reduction_from_override(std::int64_t p, int ap_val) {
  ReductionInfo info;
  info.prime = p;
  info.ap = ap_val;
  switch (ap_val) {
    case 1: info.kind = ReductionKind::split_multiplicative; break;
    case -1: info.kind = ReductionKind::nonsplit_multiplicative; break;
    case 0: info.kind = ReductionKind::additive; break;
    default:
      throw std::invalid_argument("bad_ap_override at p=" + std::to_string(p) +
                                  " must be in {-1,0,1}");
  }
  return info;
}

// Singular-point tangent test for bad odd p on the completed square
// Y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.  Near a singular x0 the cubic reads
// c2 (x-x0)^2 + 4 (x-x0)^3 with c2 = 12 x0 + b2; node tangents are
// Y = +-sqrt(c2)(x-x0), so split iff chi(c2) = +1, cusp iff c2 = 0.
ReductionInfo reduction_tangent_test(const EllipticCurve& e, std::int64_t p) {
  const auto chi = legendre_table(p);
  const std::int64_t c3 = 4 % p;
  const std::int64_t b2 = mod_reduce(e.b2(), p);
  const std::int64_t b4x2 = mod_reduce(2 * e.b4(), p);
  const std::int64_t b6 = mod_reduce(e.b6(), p);
  for (std::int64_t x = 0; x < p; ++x) {
    const std::int64_t f = (((c3 * x + b2) % p * x + b4x2) % p * x + b6) % p;
    const std::int64_t fp = ((12 % p) * ((x * x) % p) % p + (2 * b2 % p) * x % p + b4x2) % p;
    if (f != 0 || fp != 0) continue;
    const std::int64_t c2 = mod_reduce(12 * x + e.b2(), p);
    ReductionInfo info;
    info.prime = p;
    if (c2 == 0) {
      info.kind = ReductionKind::additive;
      info.ap = 0;
    } else if (chi[static_cast<std::size_t>(c2)] > 0) {
      info.kind = ReductionKind::split_multiplicative;
      info.ap = 1;
    } else {
      info.kind = ReductionKind::nonsplit_multiplicative;
      info.ap = -1;
    }
    return info;
  }
  throw std::runtime_error("tangent test: no singular point mod " + std::to_string(p) +
                           " (prime marked bad is good for this model?)");
}

}  // namespace

std::int64_t EllipticCurve::discriminant() const {
  const std::int64_t B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
  return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

void EllipticCurve::validate() const {
  if (discriminant() == 0) throw std::invalid_argument("EllipticCurve: singular model (disc = 0)");
  if (conductor < 1) throw std::invalid_argument("EllipticCurve: conductor must be positive");
  std::set<std::int64_t> seen(singular_fiber_q.begin(), singular_fiber_q.end());
  if (seen.size() != singular_fiber_q.size()) {
    throw std::invalid_argument("EllipticCurve: singular fibre q_j values must be distinct");
  }
  for (auto q : singular_fiber_q) {
    if (q < 2) throw std::invalid_argument("EllipticCurve: fibre q_j must be >= 2");
  }
}

const char* to_string(ReductionKind k) {
  switch (k) {
    case ReductionKind::good: return "good";
    case ReductionKind::split_multiplicative: return "split-multiplicative";
    case ReductionKind::nonsplit_multiplicative: return "nonsplit-multiplicative";
    case ReductionKind::additive: return "additive";
  }
  return "?";
}

EllipticCurve builtin_curve(const std::string& name) {
  EllipticCurve e;
  if (name == "11a") {
    e = {0, -1, 1, -10, -20, 11, {{11, 1}}, {}, "11a"};
  } else if (name == "37a") {
    // Nonsplit at 37: the reduced curve has p+1 nonsingular points.
    e = {0, 0, 1, -1, 0, 37, {{37, -1}}, {}, "37a"};
  } else {
    throw std::invalid_argument("unknown builtin curve: " + name);
  }
  e.validate();
  return e;
}

EllipticCurve curve_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  EllipticCurve e;
  e.a1 = j.at("a1").get<std::int64_t>();
  e.a2 = j.at("a2").get<std::int64_t>();
  e.a3 = j.at("a3").get<std::int64_t>();
  e.a4 = j.at("a4").get<std::int64_t>();
  e.a6 = j.at("a6").get<std::int64_t>();
  e.conductor = j.at("conductor").get<std::int64_t>();
  if (j.contains("bad_ap")) {
    for (const auto& [key, val] : j.at("bad_ap").items()) {
      e.bad_ap_override[std::stoll(key)] = val.get<int>();
    }
  }
  if (j.contains("fiber_q")) {
    e.singular_fiber_q = j.at("fiber_q").get<std::vector<std::int64_t>>();
  }
  if (j.contains("name")) e.name = j.at("name").get<std::string>();
  e.validate();
  return e;
}

std::string curve_to_json(const EllipticCurve& e) {
  nlohmann::json j;
  j["a1"] = e.a1;
  j["a2"] = e.a2;
  j["a3"] = e.a3;
  j["a4"] = e.a4;
  j["a6"] = e.a6;
  j["conductor"] = e.conductor;
  if (!e.bad_ap_override.empty()) {
    nlohmann::json bad;
    for (const auto& [p, v] : e.bad_ap_override) bad[std::to_string(p)] = v;
    j["bad_ap"] = bad;
  }
  if (!e.singular_fiber_q.empty()) j["fiber_q"] = e.singular_fiber_q;
  if (!e.name.empty()) j["name"] = e.name;
  return j.dump();
}

ReductionInfo ap(const EllipticCurve& e, std::int64_t p, std::int64_t count_bound) {
  if (!is_prime(p)) throw std::invalid_argument("ap: " + std::to_string(p) + " is not prime");
  if (p > count_bound) {
    throw std::invalid_argument("ap: p = " + std::to_string(p) + " exceeds counting bound " +
                                std::to_string(count_bound));
  }
  const bool bad = e.conductor % p == 0;
  if (bad) {
    if (auto it = e.bad_ap_override.find(p); it != e.bad_ap_override.end()) {
      return reduction_from_override(p, it->second);
    }
    if (p == 2) {
      throw std::invalid_argument("ap: bad prime 2 needs bad_ap_override for curve " + e.name);
    }
    return reduction_tangent_test(e, p);
  }
  ReductionInfo info;
  info.prime = p;
  info.kind = ReductionKind::good;
  info.ap = (p <= 3) ? (p + 1 - count_points_brute(e, p)) : ap_char_sum(e, p);
  return info;
}

dirichlet::CoeffSeries l_coeffs(const EllipticCurve& e, std::int64_t n) {
  EulerFactorMap factors;
  factors.max_degree = 2;
  EllipticCurve curve = e;
  factors.fallback = [curve, n](std::int64_t p) -> std::vector<double> {
    const ReductionInfo info = ap(curve, p, n);
    const double apd = static_cast<double>(info.ap);
    if (info.kind == ReductionKind::good) {
      return {1.0, -apd, static_cast<double>(p)};
    }
    return {1.0, -apd};
  };
  CoeffSeries out = euler_expand(factors, n, /*invert=*/true, "L(" + e.name + ")");
  out.integral = true;
  return out;
}

dirichlet::CoeffSeries zetaE_sq_coeffs(const EllipticCurve& e, std::int64_t n) {
  // zeta(s)^2 zeta(s-1)^2 / L(E,s)^2: two zeta convolutions against the
  // expanded square of the reciprocal local polynomials.
  EulerFactorMap factors;
  factors.max_degree = 4;
  EllipticCurve curve = e;
  factors.fallback = [curve, n](std::int64_t p) -> std::vector<double> {
    const ReductionInfo info = ap(curve, p, n);
    const double apd = static_cast<double>(info.ap);
    if (info.kind == ReductionKind::good) {
      const double pd = static_cast<double>(p);
      // (1 - ap u + p u^2)^2
      return {1.0, -2.0 * apd, apd * apd + 2.0 * pd, -2.0 * apd * pd, pd * pd};
    }
    // (1 - ap u)^2
    return {1.0, -2.0 * apd, apd * apd};
  };
  CoeffSeries inv_l_sq = euler_expand(factors, n, /*invert=*/false, "1/L^2");
  CoeffSeries z2 = dirichlet::convolve(CoeffSeries::ones(n), CoeffSeries::ones(n));
  CoeffSeries zs2 =
      dirichlet::convolve(CoeffSeries::shifted_zeta(n), CoeffSeries::shifted_zeta(n));
  CoeffSeries out = dirichlet::convolve(dirichlet::convolve(z2, zs2), inv_l_sq);
  out.label = "zetaE^2(" + e.name + ")";
  return out;
}

dirichlet::CoeffSeries cE_coeffs(const EllipticCurve& e, std::int64_t n, CoeffVariant variant) {
  e.validate();
  std::int64_t scale_q = e.conductor;
  if (variant == CoeffVariant::fiber_corrected) {
    if (e.singular_fiber_q.empty()) {
      throw std::invalid_argument("cE_coeffs: fiber_corrected variant needs singular_fiber_q");
    }
    for (auto q : e.singular_fiber_q) scale_q *= q;
  }
  // Support lives on (scale_q * m)^2; only m <= sqrt(n)/scale_q matters.
  std::int64_t m_limit = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))) / scale_q;
  while ((m_limit + 1) * scale_q * (m_limit + 1) * scale_q <= n) ++m_limit;
  m_limit = std::max<std::int64_t>(m_limit, 1);

  CoeffSeries base = zetaE_sq_coeffs(e, m_limit);
  if (variant == CoeffVariant::fiber_corrected) {
    // Multiply by the squared singular-fibre factors (1 - q_j u)^{-2} in the
    // base (pre-square-support) variable: series sum_k (k+1) q_j^k at q_j^k.
    for (auto qj : e.singular_fiber_q) {
      CoeffSeries next = CoeffSeries::zeros(m_limit, base.label);
      for (std::int64_t m = 1; m <= m_limit; ++m) {
        const double v = base.at(m);
        if (v == 0.0) continue;
        double w = 1.0;
        std::int64_t idx = m;
        for (int k = 0;; ++k) {
          if (k > 0) {
            if (idx > m_limit / qj) break;
            idx *= qj;
            w *= static_cast<double>(qj);
          }
          next.at(idx) += (k + 1) * w * v;
        }
      }
      next.multiplicative = false;
      base = std::move(next);
    }
  }
  CoeffSeries on_squares = dirichlet::square_support(base, std::max<std::int64_t>(n / (scale_q * scale_q), 1));
  CoeffSeries out = dirichlet::shift_support(on_squares, scale_q, n);
  if (variant == CoeffVariant::fiber_corrected) {
    for (auto& v : out.values) v *= static_cast<double>(scale_q);
  }
  out.label = "cE(" + e.name + ")";
  return out;
}

std::vector<double> partial_euler_L1_ladder(const EllipticCurve& e,
                                            const std::vector<std::int64_t>& thresholds,
                                            std::int64_t count_bound) {
  if (thresholds.empty()) return {};
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("partial_euler_L1_ladder: thresholds must be increasing");
  }
  const std::int64_t t_max = thresholds.back();
  if (t_max < 2) {
    return std::vector<double>(thresholds.size(), 1.0);
  }
  std::vector<double> out;
  out.reserve(thresholds.size());
  dd product{1.0, 0.0};
  std::size_t next = 0;
  const auto& primes = dirichlet::primes_up_to(t_max);
  for (std::size_t i = 0; i <= primes.size(); ++i) {
    const std::int64_t p = (i < primes.size()) ? primes[i] : t_max + 1;
    while (next < thresholds.size() && p > thresholds[next]) {
      out.push_back(product.to_double());
      ++next;
    }
    if (i == primes.size() || p > t_max) break;
    const ReductionInfo info = ap(e, p, count_bound);
    const double pd = static_cast<double>(p);
    double factor;
    if (info.kind == ReductionKind::good) {
      factor = 1.0 - static_cast<double>(info.ap) / pd + 1.0 / pd;
    } else {
      factor = 1.0 - static_cast<double>(info.ap) / pd;
    }
    product = product / dd{factor};
  }
  while (next < thresholds.size()) {
    out.push_back(product.to_double());
    ++next;
  }
  return out;
}

double partial_euler_L1(const EllipticCurve& e, std::int64_t t_bound, std::int64_t count_bound) {
  if (t_bound < 2) return 1.0;  // empty product
  return partial_euler_L1_ladder(e, {t_bound}, count_bound)[0];
}

double goldfeld_C1_from_L(std::int64_t conductor, double l_value) {
  if (l_value == 0.0) throw std::domain_error("goldfeld_C1: vanishing partial product");
  const double zeta0_sq = 0.25;  // zeta(0) = -1/2
  const double front = kGamma14 * kGamma14 / (16.0 * std::sqrt(2.0));
  return -(1.0 / static_cast<double>(conductor)) * front * zeta0_sq * kZetaHalf * kZetaHalf /
         (l_value * l_value);
}

double goldfeld_C1(const EllipticCurve& e, std::int64_t t_bound, std::int64_t count_bound) {
  return goldfeld_C1_from_L(e.conductor, partial_euler_L1(e, t_bound, count_bound));
}

}  // namespace bterm::curves
