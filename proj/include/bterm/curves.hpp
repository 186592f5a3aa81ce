#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bterm/dirichlet.hpp"

namespace bterm::curves {

// Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
// with its conductor.  The conductor is input data, not computed.
struct EllipticCurve {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  std::int64_t conductor = 0;
  // Optional a_p values in {-1,0,1} for bad primes where the tangent test is
  // ambiguous (p = 2, or any prime the caller wants to pin).
  std::map<std::int64_t, int> bad_ap_override;
  // Prime powers q_j entering the singular-fibre factor n(s); pairwise
  // distinct.  Needed only for the fibre-corrected coefficient variant.
  std::vector<std::int64_t> singular_fiber_q;
  std::string name;

  // b-invariants of the completed square (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
  std::int64_t b2() const { return a1 * a1 + 4 * a2; }
  std::int64_t b4() const { return 2 * a4 + a1 * a3; }
  std::int64_t b6() const { return a3 * a3 + 4 * a6; }
  std::int64_t b8() const { return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4; }
  std::int64_t discriminant() const;

  void validate() const;
};

enum class ReductionKind { good, split_multiplicative, nonsplit_multiplicative, additive };

struct ReductionInfo {
  std::int64_t prime = 0;
  ReductionKind kind = ReductionKind::good;
  std::int64_t ap = 0;
};

const char* to_string(ReductionKind k);

// Builtin models: "11a" = (0,-1,1,-10,-20), q = 11; "37a" = (0,0,1,-1,0), q = 37.
EllipticCurve builtin_curve(const std::string& name);

// Parse {a1,a2,a3,a4,a6,conductor,bad_ap:{...},fiber_q:[...]} JSON text.
EllipticCurve curve_from_json(const std::string& json_text);
std::string curve_to_json(const EllipticCurve& e);

// Trace of Frobenius / reduction data at p.
//  - good p: a_p = p + 1 - #E(F_p), counted with a quadratic-residue table;
//  - bad p:  kind from the singular-point tangent test (p >= 3) or the
//    override; a_p follows the kind (+1 split, -1 nonsplit, 0 additive).
// Throws when p exceeds count_bound or an ambiguous bad prime lacks an
// override.
ReductionInfo ap(const EllipticCurve& e, std::int64_t p, std::int64_t count_bound = 1'000'000);

// Coefficients a(n) of the L-function, Hasse-Weil normalization
// (a(p^{k+1}) = a_p a(p^k) - p a(p^{k-1}) at good p, a(p^k) = a_p^k at bad p).
dirichlet::CoeffSeries l_coeffs(const EllipticCurve& e, std::int64_t n);

// Coefficients of zeta(s)^2 zeta(s-1)^2 / L(E,s)^2 (nonnegative).
dirichlet::CoeffSeries zetaE_sq_coeffs(const EllipticCurve& e, std::int64_t n);

enum class CoeffVariant {
  conductor_only,   // c supported on (q_E m)^2, c((q_E m)^2) = b(m)
  fiber_corrected,  // scale c_E = q_E prod q_j, extra singular-fibre factors
};

// The boundary-term coefficient sequence c feeding Z_E.
dirichlet::CoeffSeries cE_coeffs(const EllipticCurve& e, std::int64_t n,
                                 CoeffVariant variant = CoeffVariant::conductor_only);

// Partial Euler product at s = 1 over primes <= T (compensated product).
double partial_euler_L1(const EllipticCurve& e, std::int64_t t_bound,
                        std::int64_t count_bound = 1'000'000);

// Incremental ladder: values of L_T(E,1) at each requested threshold, one
// sieve pass.  Thresholds must be increasing.
std::vector<double> partial_euler_L1_ladder(const EllipticCurve& e,
                                            const std::vector<std::int64_t>& thresholds,
                                            std::int64_t count_bound = 1'000'000);

// C1(T) = -q_E^{-1} (Gamma(1/4)^2 / (16 sqrt 2)) zeta(0)^2 zeta(1/2)^2 / L_T(E,1)^2.
double goldfeld_C1(const EllipticCurve& e, std::int64_t t_bound,
                   std::int64_t count_bound = 1'000'000);
// Same from a precomputed L_T(E,1) value.
double goldfeld_C1_from_L(std::int64_t conductor, double l_value);

}  // namespace bterm::curves
