#include "bterm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bterm/curves.hpp"
#include "bterm/dirichlet.hpp"
#include "bterm/specfun.hpp"
#include "bterm/stochastic.hpp"
#include "bterm/verify.hpp"
#include "bterm/version.hpp"
#include "bterm/zseries.hpp"

namespace bterm::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string curve_spec = "11a";  // builtin name or inline "a1,a2,a3,a4,a6"
  std::int64_t conductor = 0;      // required with the inline form
  std::string bad_ap;              // "p:ap,p:ap"
  std::string fiber_q;             // "q1,q2"
  std::optional<json> curve_json;  // full object from a config file

  zseries::TruncationPlan plan{};  // plan.T == 0 means "derive from grid"
  double x_lo = 0.2, x_hi = 1.0;
  int points = 50;

  std::string out_path;  // empty = stdout
  std::string format = "csv";
  std::uint64_t seed = 0;
  int threads = 1;
  double rel_tol = 1e-12;
  std::int64_t count_bound = 1'000'000;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  return out;
}

curves::EllipticCurve resolve_curve(const RunConfig& cfg) {
  if (cfg.curve_json) return curves::curve_from_json(cfg.curve_json->dump());
  if (cfg.curve_spec == "11a" || cfg.curve_spec == "37a") {
    return curves::builtin_curve(cfg.curve_spec);
  }
  if (cfg.curve_spec.find(',') == std::string::npos) {
    throw std::invalid_argument("unknown curve: " + cfg.curve_spec +
                                " (use a builtin name or 'a1,a2,a3,a4,a6')");
  }
  const auto a = parse_int_list(cfg.curve_spec);
  if (a.size() != 5) {
    throw std::invalid_argument("inline curve must have five integers a1,a2,a3,a4,a6");
  }
  if (cfg.conductor < 1) {
    throw std::invalid_argument("inline curve requires --conductor");
  }
  curves::EllipticCurve e;
  e.a1 = a[0];
  e.a2 = a[1];
  e.a3 = a[2];
  e.a4 = a[3];
  e.a6 = a[4];
  e.conductor = cfg.conductor;
  e.name = cfg.curve_spec;
  if (!cfg.bad_ap.empty()) {
    std::stringstream ss(cfg.bad_ap);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("--bad-ap wants p:ap pairs");
      e.bad_ap_override[std::stoll(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
    }
  }
  if (!cfg.fiber_q.empty()) e.singular_fiber_q = parse_int_list(cfg.fiber_q);
  e.validate();
  return e;
}

// Serialized effective configuration: identifies a run well enough to
// reproduce its numeric columns byte for byte.
json effective_config(const RunConfig& cfg, const std::string& command, const json& extra) {
  json j;
  j["command"] = command;
  j["curve"] = cfg.curve_json ? *cfg.curve_json : json(cfg.curve_spec);
  j["plan"] = {{"T", cfg.plan.T}, {"R", cfg.plan.R},     {"alpha", cfg.plan.alpha},
               {"beta", cfg.plan.beta}, {"eps", cfg.plan.eps}};
  j["grid"] = {{"x_lo", cfg.x_lo}, {"x_hi", cfg.x_hi}, {"points", cfg.points}};
  j["seed"] = cfg.seed;
  j["rel_tol"] = cfg.rel_tol;
  j["extra"] = extra;
  return j;
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = nullptr;

  explicit OutputTarget(const std::string& path) {
    if (path.empty()) {
      os = &std::cout;
    } else {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      os = &file;
    }
  }
};

std::vector<std::pair<std::string, std::string>> meta_rows(const RunConfig& cfg, const json& eff) {
  const std::string dump = eff.dump();
  return {{"version", BTERM_VERSION},
          {"config_hash", hex64(fnv1a(dump))},
          {"seed", std::to_string(cfg.seed)}};
}

void write_grid_csv(std::ostream& os, const zseries::SignScanReport& report,
                    const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
  os << "x,value,bound,sign\n";
  char buf[128];
  for (const auto& pt : report.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%c\n", pt.x, pt.value, pt.bound, pt.sign);
    os << buf;
  }
}

json report_to_json(const zseries::SignScanReport& report) {
  json rows = json::array();
  for (const auto& pt : report.points) {
    rows.push_back({{"x", pt.x}, {"value", pt.value}, {"bound", pt.bound},
                    {"sign", std::string(1, pt.sign)}});
  }
  json brackets = json::array();
  for (const auto& [lo, hi] : report.sign_change_brackets) brackets.push_back({lo, hi});
  return {{"rows", rows},
          {"sign_change_brackets", brackets},
          {"prefix_sign", std::string(1, report.prefix_sign)},
          {"prefix_end", report.prefix_end},
          {"certified", report.certified},
          {"indeterminate", report.indeterminate}};
}

void write_grid_json(std::ostream& os, const zseries::SignScanReport& report, const json& eff,
                     std::uint64_t seed) {
  json j = report_to_json(report);
  j["meta"] = {{"version", BTERM_VERSION},
               {"config_hash", hex64(fnv1a(eff.dump()))},
               {"seed", seed},
               {"config", eff}};
  os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

int cmd_coeffs(const RunConfig& cfg, const std::string& what, std::int64_t limit,
               const std::string& variant) {
  const auto curve = resolve_curve(cfg);
  dirichlet::CoeffSeries series;
  bool must_be_nonnegative = false;
  if (what == "cE") {
    const auto v = variant == "nE" ? curves::CoeffVariant::fiber_corrected
                                   : curves::CoeffVariant::conductor_only;
    series = curves::cE_coeffs(curve, limit, v);
    must_be_nonnegative = true;
  } else if (what == "L") {
    series = curves::l_coeffs(curve, limit);
  } else if (what == "zetaE2") {
    series = curves::zetaE_sq_coeffs(curve, limit);
    must_be_nonnegative = true;
  } else if (what == "aweights") {
    series = dirichlet::a_weights(curves::cE_coeffs(curve, limit));
    must_be_nonnegative = true;
  } else {
    throw std::invalid_argument("--what must be one of cE, L, zetaE2, aweights");
  }
  double min_value = 0.0;
  std::int64_t min_index = 0;
  for (std::int64_t n = 1; n <= series.limit; ++n) {
    if (min_index == 0 || series.at(n) < min_value) {
      min_value = series.at(n);
      min_index = n;
    }
  }
  const json eff = effective_config(cfg, "coeffs",
                                    {{"what", what}, {"limit", limit}, {"variant", variant}});
  OutputTarget out(cfg.out_path);
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::int64_t n = 1; n <= series.limit; ++n) {
      if (series.at(n) != 0.0) rows.push_back({{"index", n}, {"value", series.at(n)}});
    }
    json j = {{"meta",
               {{"version", BTERM_VERSION},
                {"config_hash", hex64(fnv1a(eff.dump()))},
                {"seed", cfg.seed},
                {"label", series.label}}},
              {"rows", rows}};
    *out.os << j.dump(2) << "\n";
  } else {
    dirichlet::write_csv(*out.os, series, meta_rows(cfg, eff));
  }
  std::cerr << "min coefficient " << min_value << " at index " << min_index << "\n";
  if (must_be_nonnegative && min_value < 0.0) {
    std::cerr << "nonnegativity violated at index " << min_index << "\n";
    return 1;
  }
  return 0;
}

zseries::TruncationPlan resolved_plan(const RunConfig& cfg) {
  zseries::TruncationPlan plan = cfg.plan;
  if (plan.T <= 0.0) plan.T = std::ceil(plan.R / (cfg.x_lo * cfg.x_lo));
  plan.validate();
  return plan;
}

int cmd_ztable(const RunConfig& cfg, bool signscan_mode, double scan_nu) {
  zseries::SignScanReport report;
  json extra;
  if (signscan_mode && scan_nu > 0.0) {
    specfun::AccuracyBudget budget;
    budget.rel_tol = cfg.rel_tol;
    report = zseries::sign_scan(
        [&](double x) {
          const double v = zseries::Z_xnu(x, scan_nu, budget);
          return std::make_pair(v, std::max(1e-9, 1e-9 * std::abs(v)));
        },
        cfg.x_lo, cfg.x_hi, cfg.points, cfg.threads);
    extra = {{"nu", scan_nu}};
  } else {
    const auto curve = resolve_curve(cfg);
    const auto plan = resolved_plan(cfg);
    if (cfg.x_lo < plan.min_admissible_x() * (1.0 - 1e-12)) {
      throw std::invalid_argument("grid violates the truncation domain: minimal admissible x is " +
                                  std::to_string(plan.min_admissible_x()) + " (raise T)");
    }
    const auto c = curves::cE_coeffs(curve, static_cast<std::int64_t>(plan.T));
    const zseries::ZE0Evaluator eval(dirichlet::a_weights(c), plan);
    report = zseries::sign_scan(
        [&](double x) {
          const auto v = zseries::Z_E(eval, x);
          return std::make_pair(v.value, v.bound);
        },
        cfg.x_lo, cfg.x_hi, cfg.points, cfg.threads);
    extra = {{"curve", curve.name}, {"T", plan.T}, {"m_eps", eval.m_eps()}};
  }
  const json eff = effective_config(cfg, signscan_mode ? "signscan" : "ztable", extra);
  OutputTarget out(cfg.out_path);
  if (cfg.format == "json") {
    write_grid_json(*out.os, report, eff, cfg.seed);
  } else {
    auto meta = meta_rows(cfg, eff);
    if (signscan_mode) {
      meta.emplace_back("certified", std::to_string(report.certified));
      meta.emplace_back("indeterminate", std::to_string(report.indeterminate));
      meta.emplace_back("prefix_sign", std::string(1, report.prefix_sign));
      meta.emplace_back("prefix_end", std::to_string(report.prefix_end));
      std::string brackets;
      for (const auto& [lo, hi] : report.sign_change_brackets) {
        brackets += "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
      }
      meta.emplace_back("sign_change_brackets", brackets.empty() ? "none" : brackets);
    }
    write_grid_csv(*out.os, report, meta);
  }
  return 0;
}

int cmd_goldfeld(const RunConfig& cfg, int rank, const std::string& ladder_text) {
  const auto curve = resolve_curve(cfg);
  std::vector<std::int64_t> ladder = parse_int_list(ladder_text);
  if (ladder.empty()) ladder = {1'000, 10'000, 100'000};
  const auto l_values = curves::partial_euler_L1_ladder(curve, ladder, cfg.count_bound);
  const json eff = effective_config(cfg, "goldfeld", {{"r", rank}, {"ladder", ladder}});
  OutputTarget out(cfg.out_path);
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const double scaled =
          l_values[i] * std::pow(std::log(static_cast<double>(ladder[i])), rank);
      rows.push_back({{"T", ladder[i]},
                      {"L_T", l_values[i]},
                      {"C1", curves::goldfeld_C1_from_L(curve.conductor, l_values[i])},
                      {"L_T_scaled", scaled}});
    }
    json j = {{"meta",
               {{"version", BTERM_VERSION},
                {"config_hash", hex64(fnv1a(eff.dump()))},
                {"seed", cfg.seed},
                {"config", eff}}},
              {"rows", rows}};
    *out.os << j.dump(2) << "\n";
  } else {
    for (const auto& [k, v] : meta_rows(cfg, eff)) *out.os << "# " << k << "=" << v << "\n";
    *out.os << "T,L_T,C1,L_T_logT_pow_r\n";
    char buf[160];
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const double scaled =
          l_values[i] * std::pow(std::log(static_cast<double>(ladder[i])), rank);
      std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g\n",
                    static_cast<long long>(ladder[i]), l_values[i],
                    curves::goldfeld_C1_from_L(curve.conductor, l_values[i]), scaled);
      *out.os << buf;
    }
  }
  return 0;
}

int cmd_omega(const RunConfig& cfg, const std::string& exclude, std::int64_t prime_bound,
              std::int64_t limit, std::int64_t samples, bool plan_given) {
  stochastic::BatchConfig bc;
  for (auto p : parse_int_list(exclude)) bc.excluded.insert(p);
  bc.prime_bound = prime_bound;
  bc.coeff_limit = limit;
  bc.num_samples = samples;
  bc.x_lo = cfg.x_lo;
  bc.x_hi = cfg.x_hi;
  bc.grid_points = cfg.points;
  bc.seed = cfg.seed;
  bc.threads = cfg.threads;
  bc.plan = cfg.plan;
  if (!plan_given) {
    // Default to a sharper tail exponent for the certified scan.
    bc.plan.alpha = 0.9;
    bc.plan.beta = 10.0;
  }
  const auto summary = stochastic::batch_sign_study(bc);
  const json eff = effective_config(
      cfg, "omega",
      {{"exclude", exclude}, {"P", prime_bound}, {"limit", limit}, {"samples", samples}});
  OutputTarget out(cfg.out_path);
  json j = json::parse(summary.to_json());
  j["meta"] = {{"version", BTERM_VERSION},
               {"config_hash", hex64(fnv1a(eff.dump()))},
               {"seed", cfg.seed},
               {"config", eff}};
  *out.os << j.dump(2) << "\n";
  return 0;
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  json j;
  in >> j;
  if (j.contains("curve")) {
    if (j["curve"].is_string()) {
      cfg.curve_spec = j["curve"].get<std::string>();
    } else {
      cfg.curve_json = j["curve"];
    }
  }
  if (j.contains("plan")) {
    const auto& p = j["plan"];
    if (p.contains("T")) cfg.plan.T = p["T"].get<double>();
    if (p.contains("R")) cfg.plan.R = p["R"].get<double>();
    if (p.contains("alpha")) cfg.plan.alpha = p["alpha"].get<double>();
    if (p.contains("beta")) cfg.plan.beta = p["beta"].get<double>();
    if (p.contains("eps")) cfg.plan.eps = p["eps"].get<double>();
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("x_lo")) cfg.x_lo = g["x_lo"].get<double>();
    if (g.contains("x_hi")) cfg.x_hi = g["x_hi"].get<double>();
    if (g.contains("points")) cfg.points = g["points"].get<int>();
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (o.contains("path")) cfg.out_path = o["path"].get<std::string>();
    if (o.contains("format")) cfg.format = o["format"].get<std::string>();
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("budget") && j["budget"].contains("rel_tol")) {
    cfg.rel_tol = j["budget"]["rel_tol"].get<double>();
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"boundary-term series toolkit for elliptic-curve zeta integrals"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override file values)");
  app.add_option("--out", cfg.out_path, "output path (default stdout)");
  app.add_option("--format", cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", cfg.threads, "worker threads");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--rel-tol", cfg.rel_tol, "relative tolerance for special functions");

  const auto add_curve_flags = [&cfg](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve_spec, "builtin name (11a, 37a) or inline a1,a2,a3,a4,a6");
    sub->add_option("--conductor", cfg.conductor, "conductor for the inline curve form");
    sub->add_option("--bad-ap", cfg.bad_ap, "bad-prime overrides p:ap,p:ap");
    sub->add_option("--fiber-q", cfg.fiber_q, "singular-fibre prime powers q1,q2,...");
  };
  const auto add_plan_flags = [&cfg](CLI::App* sub) {
    sub->add_option("--T", cfg.plan.T, "kernel-sum cutoff (default R/x_lo^2)");
    sub->add_option("--R", cfg.plan.R, "truncation validity scale");
    sub->add_option("--alpha", cfg.plan.alpha, "tail exponent parameter in (0,1)");
    sub->add_option("--beta", cfg.plan.beta, "tail exponent parameter > 1");
    sub->add_option("--eps", cfg.plan.eps, "coefficient growth exponent in (0,1)");
  };
  const auto add_grid_flags = [&cfg](CLI::App* sub) {
    sub->add_option("--xlo", cfg.x_lo, "grid lower end");
    sub->add_option("--xhi", cfg.x_hi, "grid upper end");
    sub->add_option("--points", cfg.points, "grid points");
  };

  auto* coeffs = app.add_subcommand("coeffs", "export coefficient series");
  std::string what = "cE", variant = "qE";
  std::int64_t limit = 1000;
  add_curve_flags(coeffs);
  coeffs->add_option("--what", what, "cE|L|zetaE2|aweights");
  coeffs->add_option("--limit", limit, "truncation limit N");
  coeffs->add_option("--variant", variant, "qE (conductor only) or nE (fibre corrected)");

  auto* ztable = app.add_subcommand("ztable", "tabulate Z_E over a grid with certificates");
  add_curve_flags(ztable);
  add_plan_flags(ztable);
  add_grid_flags(ztable);

  auto* signscan = app.add_subcommand("signscan", "certified sign scan of Z_E or Z(.,nu)");
  double scan_nu = 0.0;
  add_curve_flags(signscan);
  add_plan_flags(signscan);
  add_grid_flags(signscan);
  signscan->add_option("--nu", scan_nu, "scan the single-frequency Z(.,nu) instead of Z_E");

  auto* goldfeld = app.add_subcommand("goldfeld", "partial Euler products and C1(T) diagnostics");
  int rank = 0;
  std::string ladder_text;
  add_curve_flags(goldfeld);
  goldfeld->add_option("--r", rank, "expected analytic rank for the scaled column");
  goldfeld->add_option("--T-ladder", ladder_text, "thresholds, e.g. 1000,10000,100000");
  goldfeld->add_option("--count-bound", cfg.count_bound, "largest prime for point counting");

  auto* omega = app.add_subcommand("omega", "random Euler-product sign study");
  std::string exclude;
  std::int64_t prime_bound = 1000, omega_limit = 10'000, samples = 20;
  add_grid_flags(omega);
  add_plan_flags(omega);
  omega->add_option("--exclude", exclude, "excluded primes, comma separated");
  omega->add_option("--P", prime_bound, "prime bound for sampled angles");
  omega->add_option("--limit", omega_limit, "coefficient truncation N");
  omega->add_option("--samples", samples, "number of omega samples");

  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance battery");
  verify::Options vopt;
  verify_cmd->add_option("--only", vopt.only, "run a single criterion");
  verify_cmd->add_flag("--corrupt-bessel", vopt.corrupt_bessel,
                       "fault-injection hook for the Bessel criterion");

  for (CLI::App* sub : {coeffs, ztable, signscan, goldfeld, omega, verify_cmd}) {
    sub->fallthrough();  // global flags may follow the subcommand
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      RunConfig file_cfg;
      load_config_file(config_path, file_cfg);
      // Merge: CLI flags were already applied into cfg; fill unset values.
      if (cfg.out_path.empty()) cfg.out_path = file_cfg.out_path;
      if (app.count("--format") == 0) cfg.format = file_cfg.format;
      if (app.count("--seed") == 0) cfg.seed = file_cfg.seed;
      if (app.count("--threads") == 0) cfg.threads = file_cfg.threads;
      if (app.count("--rel-tol") == 0) cfg.rel_tol = file_cfg.rel_tol;
      for (CLI::App* sub : {coeffs, ztable, signscan, goldfeld, omega}) {
        if (!sub->parsed()) continue;
        if (sub->count("--curve") == 0) {
          cfg.curve_spec = file_cfg.curve_spec;
          cfg.curve_json = file_cfg.curve_json;
        }
        if (sub->get_option_no_throw("--T") && sub->count("--T") == 0) cfg.plan.T = file_cfg.plan.T;
        if (sub->get_option_no_throw("--R") && sub->count("--R") == 0) cfg.plan.R = file_cfg.plan.R;
        if (sub->get_option_no_throw("--alpha") && sub->count("--alpha") == 0)
          cfg.plan.alpha = file_cfg.plan.alpha;
        if (sub->get_option_no_throw("--beta") && sub->count("--beta") == 0)
          cfg.plan.beta = file_cfg.plan.beta;
        if (sub->get_option_no_throw("--eps") && sub->count("--eps") == 0)
          cfg.plan.eps = file_cfg.plan.eps;
        if (sub->get_option_no_throw("--xlo") && sub->count("--xlo") == 0) cfg.x_lo = file_cfg.x_lo;
        if (sub->get_option_no_throw("--xhi") && sub->count("--xhi") == 0) cfg.x_hi = file_cfg.x_hi;
        if (sub->get_option_no_throw("--points") && sub->count("--points") == 0)
          cfg.points = file_cfg.points;
      }
    }

    if (coeffs->parsed()) return cmd_coeffs(cfg, what, limit, variant);
    if (ztable->parsed()) return cmd_ztable(cfg, false, 0.0);
    if (signscan->parsed()) return cmd_ztable(cfg, true, scan_nu);
    if (goldfeld->parsed()) return cmd_goldfeld(cfg, rank, ladder_text);
    if (omega->parsed()) {
      const bool plan_given = omega->count("--alpha") > 0 || omega->count("--beta") > 0;
      return cmd_omega(cfg, exclude, prime_bound, omega_limit, samples, plan_given);
    }
    if (verify_cmd->parsed()) {
      vopt.threads = cfg.threads;
      return verify::verify_main(vopt, std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace bterm::cli
