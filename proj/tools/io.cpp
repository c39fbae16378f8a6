#include "io.hpp"

#include <cmath>
#include <set>

#include "ineqgcc/error.hpp"

namespace ineqgcc::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::InvalidInput, "field '" + path + "': " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) schema_error(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      schema_error(where.empty() ? item.key() : where + "." + item.key(),
                   "unknown field");
    }
  }
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) schema_error(path, "missing");
  return *it;
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

long long read_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<long long>();
}

Vector read_vector(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        read_number(v[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

/// Row-major array of arrays. An empty outer array gives `rows_if_empty`
/// rows and zero columns.
Matrix read_matrix(const json& v, const std::string& path,
                   Eigen::Index rows_if_empty = 0) {
  if (!v.is_array()) schema_error(path, "expected an array of rows");
  if (v.empty()) return Matrix(rows_if_empty, 0);
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) schema_error(rp, "expected a row array");
    if (v[i].size() != cols) {
      schema_error(rp, "row has " + std::to_string(v[i].size()) +
                           " entries, expected " + std::to_string(cols));
    }
    for (std::size_t k = 0; k < cols; ++k) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          read_number(v[i][k], rp + "[" + std::to_string(k) + "]");
    }
  }
  return out;
}

IndexSet read_indices(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of integers");
  IndexSet out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(static_cast<int>(read_integer(v[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

int read_count(const json& j, const std::string& key, const std::string& path, int fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  const long long v = read_integer(*it, path);
  if (v < 0 || v > 1'000'000'000) schema_error(path, "out of range");
  return static_cast<int>(v);
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void read_structure(const json& doc, ProblemSpec& s) {
  s.B = read_matrix(need(doc, "B", "B"), "B");
  s.d = read_vector(need(doc, "d", "d"), "d");
  s.D = doc.contains("D") ? read_matrix(doc["D"], "D", s.d.size())
                          : Matrix(s.d.size(), 0);
  if (doc.contains("eq_indices")) s.eq_indices = read_indices(doc["eq_indices"], "eq_indices");
}

void read_slopes(const json& doc, LoadedProblem& p) {
  if (doc.contains("d_slope")) p.d_slope = read_vector(doc["d_slope"], "d_slope");
  if (doc.contains("mu_slope")) p.mu_slope = read_vector(doc["mu_slope"], "mu_slope");
}

}  // namespace

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // The byte offset is turned into a line and column for the message.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::InvalidInput, "malformed JSON at line " + std::to_string(line) +
                                      ", column " + std::to_string(col));
  }
}

json lp_model_to_json(const LpModel& m) {
  return json{{"gamma", vector_json(m.gamma)},
              {"gamma_known", m.gamma_known},
              {"Gamma", matrix_json(m.Gamma)},
              {"m", vector_json(m.m)},
              {"A", matrix_json(m.A)},
              {"b", vector_json(m.b)},
              {"theta", m.theta}};
}

LpModel lp_model_from_json(const json& j) {
  check_keys(j, "lp_model", {"gamma", "gamma_known", "Gamma", "m", "A", "b", "theta"});
  LpModel m;
  m.gamma = read_vector(need(j, "gamma", "lp_model.gamma"), "lp_model.gamma");
  if (j.contains("gamma_known")) {
    if (!j["gamma_known"].is_boolean()) schema_error("lp_model.gamma_known", "expected a boolean");
    m.gamma_known = j["gamma_known"].get<bool>();
  }
  m.Gamma = read_matrix(need(j, "Gamma", "lp_model.Gamma"), "lp_model.Gamma");
  m.m = read_vector(need(j, "m", "lp_model.m"), "lp_model.m");
  m.b = j.contains("b") ? read_vector(j["b"], "lp_model.b") : Vector(0);
  m.A = j.contains("A") ? read_matrix(j["A"], "lp_model.A") : Matrix(0, m.gamma.size());
  if (m.A.rows() == 0) m.A.resize(0, m.gamma.size());
  if (j.contains("theta")) m.theta = read_number(j["theta"], "lp_model.theta");
  return m;
}

json moment_data_to_json(const MomentData& d) {
  json j{{"g", matrix_json(d.g_obs)}, {"d_delta", d.d_delta}};
  if (d.d_delta > 0) j["G"] = matrix_json(d.G_obs);
  if (!d.cluster_ids.empty()) j["cluster_ids"] = d.cluster_ids;
  return j;
}

MomentData moment_data_from_json(const json& j) {
  check_keys(j, "moment_data", {"g", "G", "d_delta", "cluster_ids", "bootstrap_reps"});
  MomentData d;
  d.g_obs = read_matrix(need(j, "g", "moment_data.g"), "moment_data.g");
  d.d_delta = read_count(j, "d_delta", "moment_data.d_delta", 0);
  d.G_obs = j.contains("G") ? read_matrix(j["G"], "moment_data.G", d.g_obs.rows())
                            : Matrix(d.g_obs.rows(), 0);
  if (j.contains("cluster_ids")) {
    const json& c = j["cluster_ids"];
    if (!c.is_array()) schema_error("moment_data.cluster_ids", "expected an array of integers");
    for (std::size_t i = 0; i < c.size(); ++i) {
      d.cluster_ids.push_back(static_cast<std::int64_t>(
          read_integer(c[i], "moment_data.cluster_ids[" + std::to_string(i) + "]")));
    }
  }
  return d;
}

LoadedProblem load_problem(const json& doc, std::uint64_t seed, int threads) {
  LoadedProblem p;
  if (!doc.is_object()) schema_error("<root>", "expected an object");

  if (doc.contains("lp_model")) {
    check_keys(doc, "", {"lp_model", "n", "Omega_source", "d_slope", "mu_slope"});
    const LpModel m = lp_model_from_json(doc["lp_model"]);
    const int n = read_count(doc, "n", "n", 1);
    const LpTranslation t = build_lp_bounds(m, n);
    const Matrix src = read_matrix(need(doc, "Omega_source", "Omega_source"), "Omega_source");
    p.spec = t.spec;
    p.est = t.estimates(src);
    // Family files on an LP model move theta itself: d(theta) has theta in
    // the first two rows.
    p.d_slope = t.d_slope;
    p.spec.d -= m.theta * t.d_slope;
    p.theta0 = m.theta;
    read_slopes(doc, p);
    p.spec.d += p.theta0 * p.d_slope;
    return p;
  }

  if (doc.contains("moment_data")) {
    check_keys(doc, "", {"moment_data", "n", "B", "D", "d", "eq_indices", "d_eq",
                         "d_slope", "mu_slope"});
    const json& mj = doc["moment_data"];
    const MomentData data = moment_data_from_json(mj);
    p.est = estimates_from_observations(data);
    const int reps = read_count(mj, "bootstrap_reps", "moment_data.bootstrap_reps", 0);
    if (reps > 0) {
      const Matrix boot = bootstrap_omega(data, reps, seed, threads);
      p.est.omega_bar = boot;
    }
    const int n = read_count(doc, "n", "n", static_cast<int>(data.g_obs.rows()));
    if (doc.contains("B")) {
      read_structure(doc, p.spec);
      p.spec.n = n;
    } else {
      const int d_eq = read_count(doc, "d_eq", "d_eq", 0);
      const auto dm = static_cast<int>(data.g_obs.cols());
      if (d_eq > dm) schema_error("d_eq", "exceeds the number of moments");
      p.spec = build_subvector(d_eq, dm - d_eq, data.d_delta, n);
    }
    read_slopes(doc, p);
    return p;
  }

  check_keys(doc, "", {"n", "B", "D", "d", "eq_indices", "mu_bar", "Pi_bar", "Omega",
                       "d_slope", "mu_slope"});
  p.spec.n = read_count(doc, "n", "n", -1);
  if (p.spec.n < 0) schema_error("n", "missing");
  read_structure(doc, p.spec);
  p.est.mu_bar = read_vector(need(doc, "mu_bar", "mu_bar"), "mu_bar");
  p.est.pi_bar = doc.contains("Pi_bar")
                     ? read_matrix(doc["Pi_bar"], "Pi_bar", p.est.mu_bar.size())
                     : Matrix(p.est.mu_bar.size(), 0);
  p.est.omega_bar = read_matrix(need(doc, "Omega", "Omega"), "Omega");
  read_slopes(doc, p);
  return p;
}

json problem_to_json(const ProblemSpec& spec, const Estimates& est) {
  json j;
  j["n"] = spec.n;
  j["B"] = matrix_json(spec.B);
  j["D"] = matrix_json(spec.D);
  j["d"] = vector_json(spec.d);
  j["eq_indices"] = spec.eq_indices;
  j["mu_bar"] = vector_json(est.mu_bar);
  j["Pi_bar"] = matrix_json(est.pi_bar);
  j["Omega"] = matrix_json(est.omega_bar);
  return j;
}

Variant parse_variant(const std::string& name) {
  if (name == "gcc") return Variant::Gcc;
  if (name == "rgcc") return Variant::Rgcc;
  fail(ErrorKind::InvalidInput, "unknown variant '" + name + "' (expected gcc or rgcc)");
}

SimulationPlan plan_from_json(const json& j) {
  check_keys(j, "", {"scenarios", "theta", "theta_grid", "theta_scale", "reps", "alpha",
                     "variants", "seed"});
  SimulationPlan plan;
  const json& list = need(j, "scenarios", "scenarios");
  if (!list.is_array() || list.empty()) schema_error("scenarios", "expected a nonempty array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "scenarios[" + std::to_string(i) + "]";
    const json& s = list[i];
    check_keys(s, path, {"label", "model", "J", "q", "n", "d_w"});
    Scenario sc;
    const std::string model = s.value("model", std::string("simple"));
    if (model == "simple") {
      sc.model = ModelKind::Simple;
    } else if (model == "interval_iv") {
      sc.model = ModelKind::IntervalIv;
    } else {
      schema_error(path + ".model", "expected \"simple\" or \"interval_iv\"");
    }
    sc.J = read_count(s, "J", path + ".J", sc.J);
    if (s.contains("q")) sc.q = read_number(s["q"], path + ".q");
    sc.n = read_count(s, "n", path + ".n", sc.n);
    sc.d_w = read_count(s, "d_w", path + ".d_w", sc.d_w);
    if (s.contains("label")) {
      if (!s["label"].is_string()) schema_error(path + ".label", "expected a string");
      sc.label = s["label"].get<std::string>();
    } else {
      sc.label = sc.model == ModelKind::Simple
                     ? "simple_J" + std::to_string(sc.J) + "_q" + json(sc.q).dump()
                     : "iv_dw" + std::to_string(sc.d_w);
    }
    if (sc.label.find_first_of(",\n\"") != std::string::npos) {
      schema_error(path + ".label", "must not contain commas, quotes or newlines");
    }
    plan.scenarios.push_back(sc);
  }
  if (j.contains("theta")) plan.theta = read_number(j["theta"], "theta");
  if (j.contains("theta_grid")) {
    const json& g = j["theta_grid"];
    if (g.is_object()) {
      check_keys(g, "theta_grid", {"lo", "hi", "points"});
      const double lo = read_number(need(g, "lo", "theta_grid.lo"), "theta_grid.lo");
      const double hi = read_number(need(g, "hi", "theta_grid.hi"), "theta_grid.hi");
      const int points = read_count(g, "points", "theta_grid.points", 0);
      if (points < 1) schema_error("theta_grid.points", "must be at least 1");
      plan.theta_grid = linspace(lo, hi, points);
    } else {
      const Vector v = read_vector(g, "theta_grid");
      plan.theta_grid.assign(v.data(), v.data() + v.size());
      if (plan.theta_grid.empty()) schema_error("theta_grid", "must not be empty");
    }
  }
  if (j.contains("theta_scale")) {
    const json& s = j["theta_scale"];
    if (s == "inv_sqrt_n") {
      plan.scale_by_root_n = true;
    } else if (s != "none") {
      schema_error("theta_scale", "expected \"none\" or \"inv_sqrt_n\"");
    }
  }
  plan.reps = read_count(j, "reps", "reps", plan.reps);
  if (plan.reps < 1) schema_error("reps", "must be at least 1");
  if (j.contains("alpha")) plan.alpha = read_number(j["alpha"], "alpha");
  if (!(plan.alpha > 0.0 && plan.alpha < 0.5)) schema_error("alpha", "must lie in (0, 0.5)");
  if (j.contains("variants")) {
    const json& v = j["variants"];
    if (!v.is_array() || v.empty()) schema_error("variants", "expected a nonempty array");
    plan.variants.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) schema_error("variants[" + std::to_string(i) + "]", "expected a string");
      plan.variants.push_back(parse_variant(v[i].get<std::string>()));
    }
  }
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned()) schema_error("seed", "expected a nonnegative integer");
    plan.seed = s.get<std::uint64_t>();
  }
  return plan;
}

json plan_to_json(const SimulationPlan& plan) {
  json list = json::array();
  for (const Scenario& sc : plan.scenarios) {
    list.push_back(json{{"label", sc.label},
                        {"model", sc.model == ModelKind::Simple ? "simple" : "interval_iv"},
                        {"J", sc.J},
                        {"q", sc.q},
                        {"n", sc.n},
                        {"d_w", sc.d_w}});
  }
  json variants = json::array();
  for (Variant v : plan.variants) variants.push_back(to_string(v));
  json j{{"scenarios", list},
         {"theta", plan.theta},
         {"theta_scale", plan.scale_by_root_n ? "inv_sqrt_n" : "none"},
         {"reps", plan.reps},
         {"alpha", plan.alpha},
         {"variants", variants},
         {"seed", plan.seed}};
  if (!plan.theta_grid.empty()) j["theta_grid"] = plan.theta_grid;
  return j;
}

std::vector<double> plan_grid(const SimulationPlan& plan, const Scenario& sc) {
  std::vector<double> grid =
      plan.theta_grid.empty() ? std::vector<double>{plan.theta} : plan.theta_grid;
  if (plan.scale_by_root_n) {
    const double s = 1.0 / std::sqrt(static_cast<double>(sc.n));
    for (double& t : grid) t *= s;
  }
  return grid;
}

json result_to_json(const TestResult& r, Variant v) {
  json j;
  j["variant"] = to_string(v);
  j["alpha"] = r.alpha;
  j["statistic"] = finite_or_null(r.statistic);
  j["dof_s"] = r.dof_s;
  if (r.dof_r) j["dof_r"] = *r.dof_r;
  if (r.dof_t) j["dof_t"] = *r.dof_t;
  j["critical_value"] = r.critical_value;
  j["refined_level"] = r.refined_level ? json(*r.refined_level) : json(nullptr);
  j["reject"] = r.reject;
  j["active_set"] = r.active_set;
  j["flags"] = r.flags;
  return j;
}

json interval_to_json(const CiResult& r, Variant v, double alpha) {
  json j;
  j["variant"] = to_string(v);
  j["alpha"] = alpha;
  j["empty"] = r.empty;
  j["lower"] = r.empty ? json(nullptr) : json(r.lower);
  j["upper"] = r.empty ? json(nullptr) : json(r.upper);
  j["lower_at_bound"] = r.lower_at_bound;
  j["upper_at_bound"] = r.upper_at_bound;
  json segs = json::array();
  for (const Segment& s : r.segments) segs.push_back(json::array({s.lower, s.upper}));
  j["segments"] = segs;
  json flags = json::array();
  if (r.empty) flags.push_back("empty");
  if (r.lower_at_bound || r.upper_at_bound) flags.push_back("at-bracket-bound");
  if (r.multi_segment) {
    flags.push_back("multi-segment");
    j["warning"] = "acceptance region is not an interval; reporting the hull of " +
                   std::to_string(r.segments.size()) + " segments";
  }
  j["flags"] = flags;
  return j;
}

}  // namespace ineqgcc::io
