#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ineqgcc/gcc.hpp"

namespace ineqgcc {

enum class Variant { Gcc, Rgcc };

const char* to_string(Variant v) noexcept;

/// Runs the chosen variant.
TestResult run_test(Variant v, const ProblemSpec& spec, const Estimates& est,
                    double alpha, const TestOptions& opt = {});

/// Problems indexed by a scalar theta: either affine,
/// d(theta) = base.d + theta d_slope and mu_bar(theta) = est.mu_bar +
/// theta mu_slope, or given by `evaluator` when it is set.
struct ProblemFamily {
  ProblemSpec base;
  Estimates est;
  Vector d_slope;
  Vector mu_slope;
  std::function<std::pair<ProblemSpec, Estimates>(double)> evaluator;

  std::pair<ProblemSpec, Estimates> at(double theta) const;
};

struct CiOptions {
  int grid_points = 64;
  /// Endpoint precision; 0 means 1e-4 (hi - lo).
  double tol = 0.0;
  int threads = 1;
  TestOptions test;
};

struct Segment {
  double lower = 0.0;
  double upper = 0.0;
};

struct CiResult {
  bool empty = false;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_at_bound = false;
  bool upper_at_bound = false;
  bool multi_segment = false;
  /// Accepted segments found by the grid scan, endpoints refined.
  std::vector<Segment> segments;
  std::vector<double> grid;
  std::vector<char> grid_accept;
};

/// Scans the bracket on a grid, then bisects each accept/reject transition
/// down to `tol`. Endpoints returned are accepted points. The reported
/// interval is the hull of the accepted segments.
CiResult invert_test(const ProblemFamily& family, double alpha, double lo,
                     double hi, Variant variant, const CiOptions& opt = {});

}  // namespace ineqgcc
