#pragma once

#include <cstdint>

#include "ineqgcc/linalg.hpp"

namespace ineqgcc {

/// minimize (mu - center)' W (mu - center)
/// subject to B mu + C delta <= d,
/// with W symmetric positive definite and no objective term in delta.
/// `C` may have zero columns (no nuisance parameter).
struct QpProblem {
  Matrix weight;
  Vector center;
  Matrix B;
  Matrix C;
  Vector d;
  double active_tol = 1e-7;
};

struct QpSolution {
  Vector mu_hat;
  Vector delta_hat;
  /// Multipliers of the constraint rows: 2W(center - mu_hat) = B' psi,
  /// C' psi = 0, psi >= 0, psi_j * slack_j = 0.
  Vector psi_hat;
  double objective = 0.0;
  IndexSet active_set;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool polished = false;
};

/// Relative KKT residual of a candidate solution: the max of stationarity,
/// primal violation, dual sign violation and complementarity, each divided by
/// the magnitude of its terms (see qp.cpp).
double kkt_residual(const QpProblem& p, const QpSolution& s);

/// Rows j with |B_j mu + C_j delta - d_j| <= tol * (1 + |d_j| + |row_j| |(mu, delta)|).
IndexSet detect_active_set(const QpProblem& p, const Vector& mu,
                           const Vector& delta, double tol);

/// Primal-dual interior point on the delta-ridged problem, followed by an
/// active-set polish that re-solves the exact (unridged) KKT system on the
/// detected active set. Throws Error(Infeasible) when a phase-1 solve
/// certifies the constraint set empty, Error(SolverFailure) otherwise.
QpSolution solve_restricted_qp(const QpProblem& p);

/// Euclidean-norm minimizer of {delta : C delta <= b}.
Vector min_norm_point(const Matrix& C, const Vector& b);

/// argmin |psi| over psi >= 0, 2W(center - mu_hat) = B'psi, C'psi = 0,
/// psi_j = 0 for j outside `active`.
Vector min_norm_multipliers(const QpProblem& p, const QpSolution& s,
                            const IndexSet& active);

/// Exhaustive oracle: every subset of rows treated as equalities, each
/// stationarity system solved by pseudoinverse, best feasible candidate
/// kept. Limited to d_C <= 12 and d_mu + d_delta <= 8.
QpSolution brute_force_qp(const QpProblem& p);

/// Process-wide statistics over every solve_restricted_qp call, used by the
/// acceptance suite to bound KKT residuals across a whole run.
struct QpStats {
  std::uint64_t solves = 0;
  std::uint64_t polish_failures = 0;
  /// max over solves of kkt_residual / (1 + |center|_inf)
  double worst_normalized_residual = 0.0;
};

QpStats qp_stats();
void reset_qp_stats();

}  // namespace ineqgcc
