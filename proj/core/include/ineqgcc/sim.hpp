#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ineqgcc/ci.hpp"
#include "ineqgcc/gcc.hpp"
#include "ineqgcc/models.hpp"
#include "ineqgcc/rng.hpp"

namespace ineqgcc {

enum class ModelKind { Simple, IntervalIv };

struct Scenario {
  std::string label;
  ModelKind model = ModelKind::Simple;
  int J = 3;       // simple model: number of inequalities
  double q = 0.0;  // simple model: local slackness of rows 3..J
  int n = 500;
  int d_w = 1;     // interval IV: number of controls (first is the constant)
};

/// One replication of the simple one-sided model at theta, using stream 0 of
/// `seed`: mu_bar and C_bar are means of n draws from N(mu, I_J) and
/// N(C, 2 I_J), Omega the sample covariance of the stacked draws.
std::pair<ProblemSpec, Estimates> simple_dgp(int J, double q, int n,
                                             double theta, std::uint64_t seed);

/// Per-observation moments of the interval-outcome IV model in the
/// parameter of interest theta2: g_i(theta2) = g0_i + theta2 g1_i and
/// Jacobian rows vec(G_i)' in the nuisance (theta1, gamma).
struct IvSample {
  int d_w = 1;
  Matrix g0;
  Matrix g1;
  Matrix G;
  int d_delta = 0;
  Vector y_lower;
  Vector y_upper;
};

IvSample interval_iv_dgp(int d_w, int n, std::uint64_t seed);

/// Family over theta2 built from an IV sample; Omega(theta2) is the exact
/// sample covariance of (g_i(theta2)', vec(G_i)')'.
ProblemFamily iv_family(const IvSample& sample);

/// Family for replication `rep` of a scenario (random stream (seed, rep)).
ProblemFamily scenario_family(const Scenario& sc, std::uint64_t seed,
                              std::uint64_t rep);

/// The true mu and C of the simple model.
Vector simple_mu(int J, double q, int n);
Vector simple_c(int J);

/// Evenly spaced grid including both ends.
std::vector<double> linspace(double lo, double hi, int points);

struct Observation {
  std::size_t rep = 0;
  std::size_t theta_index = 0;
  double theta = 0.0;
  const TestResult* gcc = nullptr;
  const TestResult* rgcc = nullptr;  // null unless RGCC was requested
};

struct SimOptions {
  double alpha = 0.05;
  std::vector<Variant> variants{Variant::Gcc, Variant::Rgcc};
  std::uint64_t base_seed = 1;
  int threads = 1;
  bool timing = false;
  TestOptions test;
  /// Called once per (rep, theta); calls are serialized but arrive in
  /// scheduling order.
  std::function<void(const Observation&)> observer;
};

struct SimRow {
  std::string scenario;
  Variant variant = Variant::Gcc;
  double theta = 0.0;
  int reps = 0;
  double reject_rate = 0.0;
  std::optional<double> median_ms;
};

std::vector<SimRow> run_power_curve(const Scenario& sc,
                                    const std::vector<double>& grid, int reps,
                                    const SimOptions& opt);

std::vector<SimRow> run_rejection_table(const Scenario& sc, double theta,
                                        int reps, const SimOptions& opt);

/// Header plus one line per row; median_ms is empty when not timed.
std::string to_csv(const std::vector<SimRow>& rows);

}  // namespace ineqgcc
