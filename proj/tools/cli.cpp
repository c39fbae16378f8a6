#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "ineqgcc/ci.hpp"
#include "ineqgcc/error.hpp"
#include "ineqgcc/parallel.hpp"
#include "ineqgcc/sim.hpp"
#include "io.hpp"

namespace ineqgcc::cli {

namespace {

using io::json;

struct Common {
  double alpha = 0.05;
  std::string variant = "gcc";
  double active_tol = 1e-7;
  double rank_tol = 1e-10;
  double sigma_ridge = 0.0;
  int threads = 0;
  std::uint64_t seed = 1;
  bool diagnostics = false;

  TestOptions test_options() const {
    TestOptions o;
    o.active_tol = active_tol;
    o.rank_tol.relative = rank_tol;
    o.diagnostics = diagnostics;
    o.sigma_ridge = sigma_ridge;
    return o;
  }

  int worker_count() const { return threads > 0 ? threads : default_threads(); }
};

void add_test_flags(CLI::App* app, Common& c) {
  app->add_option("--alpha", c.alpha, "Nominal level")->check(CLI::Range(1e-12, 0.5));
  app->add_option("--variant", c.variant, "gcc or rgcc")
      ->check(CLI::IsMember({"gcc", "rgcc"}));
  app->add_option("--active-tol", c.active_tol, "Relative active-set tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--rank-tol", c.rank_tol, "Relative singular-value cutoff for ranks")
      ->check(CLI::PositiveNumber);
  app->add_option("--sigma-ridge", c.sigma_ridge,
                  "Ridge added to Sigma before inversion (default 0: refuse)")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--diagnostics", c.diagnostics, "Also compute the r and t dof diagnostics");
}

void add_run_flags(CLI::App* app, Common& c) {
  app->add_option("--threads", c.threads,
                  "Worker threads (default INEQGCC_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", c.seed, "Random seed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::LoadedProblem load(const std::string& path, const Common& c) {
  return io::load_problem(io::parse_document(read_file(path)), c.seed, c.worker_count());
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// One key per line and one matrix row per line, so generated files stay
// readable and diffable.
void emit_problem(std::ostream& out, const json& j) {
  out << "{\n";
  std::size_t k = 0;
  for (const auto& item : j.items()) {
    out << "  " << json(item.key()).dump() << ": ";
    const json& v = item.value();
    if (v.is_array() && !v.empty() && v[0].is_array()) {
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out << "    " << v[i].dump() << (i + 1 < v.size() ? ",\n" : "\n");
      }
      out << "  ]";
    } else {
      out << v.dump();
    }
    out << (++k < j.size() ? ",\n" : "\n");
  }
  out << "}\n";
}

int cmd_test(const std::string& path, const Common& c, std::ostream& out) {
  const io::LoadedProblem p = load(path, c);
  const Variant v = io::parse_variant(c.variant);
  const TestResult r = run_test(v, p.spec, p.est, c.alpha, c.test_options());
  emit(out, io::result_to_json(r, v));
  return r.reject ? kReject : kAccept;
}

struct CiFlags {
  double lo = 0.0;
  double hi = 0.0;
  double tol = 0.0;
  int grid = 64;
};

int cmd_ci(const std::string& path, const Common& c, const CiFlags& f, std::ostream& out) {
  const io::LoadedProblem p = load(path, c);
  ProblemFamily fam;
  fam.base = p.spec;
  fam.est = p.est;
  fam.d_slope = p.d_slope;
  fam.mu_slope = p.mu_slope;
  if (fam.d_slope.size() == 0 && fam.mu_slope.size() == 0) {
    fail(ErrorKind::InvalidInput, "field 'd_slope': a family file needs d_slope or mu_slope");
  }
  if (p.theta0 != 0.0) fam.base.d -= p.theta0 * fam.d_slope;
  CiOptions o;
  o.grid_points = f.grid;
  o.tol = f.tol;
  o.threads = c.worker_count();
  o.test = c.test_options();
  const Variant v = io::parse_variant(c.variant);
  const CiResult r = invert_test(fam, c.alpha, f.lo, f.hi, v, o);
  emit(out, io::interval_to_json(r, v, c.alpha));
  return kAccept;
}

int cmd_validate(const std::string& path, const Common& c, std::ostream& out) {
  json report;
  try {
    const io::LoadedProblem p = load(path, c);
    validate(p.spec, p.est);
    report["valid"] = true;
    report["d_c"] = p.spec.d_c();
    report["d_mu"] = p.spec.d_mu();
    report["d_delta"] = p.spec.d_delta();
    report["n"] = p.spec.n;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidInput) throw;
    report["valid"] = false;
    report["error"] = e.what();
    emit(out, report);
    return kInputError;
  }
  emit(out, report);
  return kAccept;
}

int cmd_simulate(const std::string& path, const std::string& out_path, const Common& c,
                 bool seed_given, bool timing, std::ostream& out) {
  io::SimulationPlan plan = io::plan_from_json(io::parse_document(read_file(path)));
  if (seed_given) plan.seed = c.seed;
  SimOptions o;
  o.alpha = plan.alpha;
  o.variants = plan.variants;
  o.base_seed = plan.seed;
  o.threads = c.worker_count();
  o.timing = timing;
  o.test = c.test_options();
  std::vector<SimRow> rows;
  for (const Scenario& sc : plan.scenarios) {
    auto part = run_power_curve(sc, io::plan_grid(plan, sc), plan.reps, o);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const std::string csv = to_csv(rows);
  if (out_path.empty() || out_path == "-") {
    out << csv;
    return kAccept;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::InvalidInput, "cannot write '" + out_path + "'");
  file << csv;
  file.close();
  if (!file) fail(ErrorKind::InvalidInput, "cannot write '" + out_path + "'");
  out << "wrote " << rows.size() << " rows for " << plan.scenarios.size()
      << " scenario(s) to " << out_path << '\n';
  return kAccept;
}

struct GenerateFlags {
  std::string model = "simple";
  int J = 3;
  double q = 0.0;
  int n = 500;
  int d_w = 1;
  double theta = 0.0;
  bool family = false;
};

int cmd_generate(const GenerateFlags& g, const Common& c, std::ostream& out) {
  if (g.model == "simple") {
    const double theta = g.family ? 0.0 : g.theta;
    const auto [spec, est] = simple_dgp(g.J, g.q, g.n, theta, c.seed);
    json j = io::problem_to_json(spec, est);
    if (g.family) {
      Vector slope = Vector::Zero(g.J);
      slope(0) = -1.0;
      slope(1) = -1.0;
      j["d_slope"] = std::vector<double>(slope.data(), slope.data() + slope.size());
    }
    emit_problem(out, j);
    return kAccept;
  }
  if (g.family) {
    fail(ErrorKind::InvalidInput,
         "interval IV families are not affine in theta; generate single problems instead");
  }
  const ProblemFamily f = iv_family(interval_iv_dgp(g.d_w, g.n, c.seed));
  const auto [spec, est] = f.at(g.theta);
  emit_problem(out, io::problem_to_json(spec, est));
  return kAccept;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional chi-squared tests for linear moment inequalities", "ineqgcc"};
  app.require_subcommand(1);
  Common common;
  std::string file;

  auto* test = app.add_subcommand("test", "Run GCC or RGCC on a problem file");
  test->add_option("problem", file, "Problem JSON")->required();
  add_test_flags(test, common);
  add_run_flags(test, common);

  CiFlags ci_flags;
  auto* ci = app.add_subcommand("ci", "Invert the test over theta for a family file");
  ci->add_option("family", file, "Family JSON (problem plus d_slope and/or mu_slope)")
      ->required();
  ci->add_option("--lo", ci_flags.lo, "Lower end of the bracket")->required();
  ci->add_option("--hi", ci_flags.hi, "Upper end of the bracket")->required();
  ci->add_option("--tol", ci_flags.tol, "Endpoint precision (default 1e-4 (hi - lo))")
      ->check(CLI::NonNegativeNumber);
  ci->add_option("--grid", ci_flags.grid, "Grid points for the initial scan")
      ->check(CLI::Range(2, 100000));
  add_test_flags(ci, common);
  add_run_flags(ci, common);

  std::string out_path;
  bool timing = false;
  auto* sim = app.add_subcommand("simulate", "Run a scenario file and write a CSV table");
  sim->add_option("scenario", file, "Scenario JSON")->required();
  sim->add_option("--out", out_path, "Output CSV (default: standard output)");
  sim->add_flag("--timing", timing, "Record the median wall time per test");
  add_test_flags(sim, common);
  auto* sim_seed = sim->add_option("--seed", common.seed, "Override the scenario seed");
  sim->add_option("--threads", common.threads,
                  "Worker threads (default INEQGCC_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber);

  auto* val = app.add_subcommand("validate", "Check a problem file against every invariant");
  val->add_option("problem", file, "Problem JSON")->required();
  add_run_flags(val, common);

  GenerateFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Print a simulated problem file");
  gen->add_option("model", gen_flags.model, "simple or iv")
      ->check(CLI::IsMember({"simple", "iv"}));
  gen->add_option("--J", gen_flags.J, "Simple model: number of inequalities")
      ->check(CLI::Range(3, 100000));
  gen->add_option("--q", gen_flags.q, "Simple model: local slackness");
  gen->add_option("--n", gen_flags.n, "Sample size")->check(CLI::Range(2, 100000000));
  gen->add_option("--d-w", gen_flags.d_w, "Interval IV: number of controls")
      ->check(CLI::Range(1, 3));
  gen->add_option("--theta", gen_flags.theta, "Value of the tested parameter");
  gen->add_flag("--family", gen_flags.family, "Emit a family file (simple model only)");
  gen->add_option("--seed", common.seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kAccept : kInputError;
  }

  try {
    if (test->parsed()) return cmd_test(file, common, out);
    if (ci->parsed()) return cmd_ci(file, common, ci_flags, out);
    if (sim->parsed()) {
      return cmd_simulate(file, out_path, common, sim_seed->count() > 0, timing, out);
    }
    if (val->parsed()) return cmd_validate(file, common, out);
    if (gen->parsed()) return cmd_generate(gen_flags, common, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidInput ? kInputError : kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace ineqgcc::cli
