#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ineqgcc/ci.hpp"
#include "ineqgcc/gcc.hpp"
#include "ineqgcc/models.hpp"
#include "ineqgcc/sim.hpp"

namespace ineqgcc::io {

using json = nlohmann::json;

/// Parses a document; malformed text raises Error(InvalidInput) with the
/// line and column of the first offending byte.
json parse_document(const std::string& text);

/// Problem files. The plain form carries every field of ProblemSpec and
/// Estimates directly; "lp_model" and "moment_data" documents are run
/// through the corresponding builder first. `seed` drives the bootstrap
/// when a moment_data document asks for one.
struct LoadedProblem {
  ProblemSpec spec;
  Estimates est;
  Vector d_slope;
  Vector mu_slope;
  /// Theta at which `spec` is evaluated (nonzero only for LP models, whose
  /// d carries theta); a family's base sits at theta = 0.
  double theta0 = 0.0;
};

LoadedProblem load_problem(const json& doc, std::uint64_t seed = 1, int threads = 1);

/// Plain form, lossless for finite entries.
json problem_to_json(const ProblemSpec& spec, const Estimates& est);

json lp_model_to_json(const LpModel& m);
LpModel lp_model_from_json(const json& j);

json moment_data_to_json(const MomentData& d);
MomentData moment_data_from_json(const json& j);

/// A batch of simulation scenarios sharing one design.
struct SimulationPlan {
  std::vector<Scenario> scenarios;
  /// Single theta for rejection tables; ignored when a grid is given.
  double theta = 0.0;
  std::vector<double> theta_grid;
  /// Multiply every theta by 1/sqrt(n) of the scenario.
  bool scale_by_root_n = false;
  int reps = 1000;
  double alpha = 0.05;
  std::vector<Variant> variants{Variant::Gcc, Variant::Rgcc};
  std::uint64_t seed = 1;
};

SimulationPlan plan_from_json(const json& j);
json plan_to_json(const SimulationPlan& plan);

/// Thetas used for one scenario of a plan.
std::vector<double> plan_grid(const SimulationPlan& plan, const Scenario& sc);

Variant parse_variant(const std::string& name);

json result_to_json(const TestResult& r, Variant v);
json interval_to_json(const CiResult& r, Variant v, double alpha);

}  // namespace ineqgcc::io
