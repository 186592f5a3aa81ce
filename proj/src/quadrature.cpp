#include "bterm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bterm/errors.hpp"

namespace bterm::quad {

namespace {

// Gauss-Kronrod (7,15) abscissae/weights on [-1,1] (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double kron = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  const double value = kron * h;
  // QUADPACK-style rescaled error estimate.
  double resabs = 0.0;
  for (int i = 0; i < 7; ++i) resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  resabs = (resabs + kWgk[7] * std::abs(fv[7])) * std::abs(h);
  double err = std::abs((kron - gauss) * h);
  if (resabs > 0.0 && err > 0.0) {
    err = resabs * std::min(1.0, std::pow(200.0 * err / resabs, 1.5));
  }
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  return {a, b, value, err};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_segments) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Piece> heap;
  heap.push(gk15(f, a, b));
  out.evaluations = 15;
  double total = heap.top().value;
  double total_err = heap.top().err;
  int segments = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && segments < max_segments) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted at double resolution
      heap.push(worst);
      break;
    }
    Piece left = gk15(f, worst.a, mid);
    Piece right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  // Re-sum in heap order for a stable total.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().err;
    heap.pop();
  }
  out.value = total;
  out.abs_error = total_err;
  out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_segments) {
  Result r = integrate(f, a, b, abs_tol, rel_tol, max_segments);
  if (!r.converged) {
    throw precision_error("quadrature failed to converge (err " + std::to_string(r.abs_error) + ")");
  }
  return r.value;
}

}  // namespace bterm::quad
