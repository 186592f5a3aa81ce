#pragma once

#include <functional>

namespace bterm::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;  // accumulated Kronrod error estimate
  long evaluations = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (7,15) bisection on [a, b].  Splits the worst
// interval until every piece meets max(abs_tol, rel_tol*|integral|) or the
// segment cap is hit.  Endpoints are never evaluated, so integrable endpoint
// singularities (log-type) are fine.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, double rel_tol = 1e-12,
                 int max_segments = 10'000);

// Same, but throws precision_error if the target is not certified.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, double rel_tol = 1e-12,
                          int max_segments = 10'000);

}  // namespace bterm::quad
