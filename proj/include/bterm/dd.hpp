#pragma once

#include <cmath>

namespace bterm {

// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
// Used where coefficient assembly must not let rounding flip a sign that is
// exactly nonnegative in real arithmetic.
struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  constexpr dd(double h, double l) : hi(h), lo(l) {}
  constexpr dd(double v) : hi(v), lo(0.0) {}  // NOLINT(google-explicit-constructor)

  double to_double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  const dd r = two_sum(s.hi, s.lo);
  return r;
}

inline dd operator-(dd a, dd b) { return a + dd{-b.hi, -b.lo}; }

inline dd operator*(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, double b) { return a * dd{b}; }

inline dd operator/(dd a, dd b) {
  const double q1 = a.hi / b.hi;
  dd r = a - b * dd{q1};
  const double q2 = r.hi / b.hi;
  r = r - b * dd{q2};
  const double q3 = r.hi / b.hi;
  dd q = two_sum(q1, q2);
  q.lo += q3;
  return two_sum(q.hi, q.lo);
}

inline dd dd_sqrt(double v) {
  const double s = std::sqrt(v);
  if (s == 0.0) return {0.0, 0.0};
  // One Newton correction in double-double: s + (v - s*s) / (2s).
  const dd err = dd{v} - two_prod(s, s);
  return two_sum(s, err.hi / (2.0 * s));
}

}  // namespace bterm
