#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bterm::verify {

struct Options {
  std::string only;            // run a single criterion by name (empty = all)
  bool corrupt_bessel = false; // fault-injection hook: perturbs the Euler constant
  int threads = 1;
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

const std::vector<std::string>& criterion_names();

// Runs the acceptance battery (one pass/fail line per criterion on `os`).
// Returns the per-criterion results; overall pass = every result passes.
std::vector<CriterionResult> run_acceptance(const Options& options, std::ostream& os);

// Convenience wrapper: prints the battery and returns 0 iff all pass, 1
// otherwise (the failing criterion is named in the output).
int verify_main(const Options& options, std::ostream& os);

// Independent quadrature oracles (exposed for the unit tests): K0/K1 as
// exp-scaled integrals e^{-x} int_0^inf e^{-x(cosh t - 1)} {1, cosh t} dt.
double oracle_k0(double x);
double oracle_k1(double x);

}  // namespace bterm::verify
