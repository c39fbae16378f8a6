#pragma once

#include <cstdint>
#include <vector>

#include "ineqgcc/gcc.hpp"

namespace ineqgcc {

/// Pairs of opposing inequalities for d_eq equalities followed by d_ineq
/// inequalities E[m] >= 0: B = [-I 0; I 0; 0 -I], D = 0, d = 0. The first
/// 2 d_eq rows are the equality indices.
ProblemSpec build_spec_test(int d_eq, int d_ineq, int n = 1);

/// The same B with a d_delta-column zero D, for subvector inference where
/// mu = E[m(theta, 0)] and Pi = E[dm/d delta'] are supplied per theta.
ProblemSpec build_subvector(int d_eq, int d_ineq, int d_delta, int n = 1);

/// theta = gamma' delta, Gamma delta = m, A delta <= b.
struct LpModel {
  Vector gamma;
  /// False when gamma is itself an estimate (its value above is then the
  /// point estimate entering Pi).
  bool gamma_known = true;
  Matrix Gamma;
  Vector m;
  Matrix A;
  Vector b;
  double theta = 0.0;
};

/// ProblemSpec for an LpModel plus the map from its estimated quantities to
/// (mu, vec Pi). `source` is (m', vec(Gamma)')' for known gamma and
/// (m', gamma', vec(Gamma)')' for unknown gamma; target = T * source.
struct LpTranslation {
  ProblemSpec spec;
  Vector d_slope;  // d(theta) = d(0) + theta * d_slope
  Matrix transform;
  Vector mu_bar;
  Matrix pi_bar;

  /// Estimates with omega = T * omega_source * T'.
  Estimates estimates(const Matrix& omega_source) const;
};

LpTranslation build_lp_bounds(const LpModel& model, int n = 1);

/// Rows orthonormal and orthogonal to the row space of Lambda, so that
/// [Lambda; Lambda_c] is nonsingular.
Matrix reparameterize_null(const Matrix& Lambda);

/// Per-observation moment levels g_i (rows of g_obs) and Jacobians G_i,
/// stored as rows vec(G_i)' (column-major) of G_obs.
struct MomentData {
  Matrix g_obs;
  Matrix G_obs;
  int d_delta = 0;
  std::vector<std::int64_t> cluster_ids;  // empty: every observation alone
};

/// Sample means and the (n-1)-divisor covariance of (g_i', vec(G_i)')'.
Estimates estimates_from_observations(const MomentData& data);

/// n times the covariance of cluster-bootstrap replicate means of the stacked
/// vector. Deterministic in (data, reps, seed).
Matrix bootstrap_omega(const MomentData& data, int reps, std::uint64_t seed,
                       int threads = 1);

}  // namespace ineqgcc
