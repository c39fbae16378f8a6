#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ineqgcc/linalg.hpp"
#include "ineqgcc/polytope.hpp"
#include "ineqgcc/qp.hpp"

namespace ineqgcc {

/// Known structure of H0: B(mu + Pi delta) + D delta <= d for some delta.
struct ProblemSpec {
  Matrix B;
  Matrix D;  // d_C x d_delta; zero columns when there is no nuisance
  Vector d;
  IndexSet eq_indices;
  int n = 1;

  Eigen::Index d_c() const { return d.size(); }
  Eigen::Index d_mu() const { return B.cols(); }
  Eigen::Index d_delta() const { return D.cols(); }
};

/// Reduced-form estimates. omega_bar is the asymptotic covariance of
/// sqrt(n) (mu_bar - mu, vec(Pi_bar - Pi)), vec stacking columns; it is not
/// divided by n.
struct Estimates {
  Vector mu_bar;
  Matrix pi_bar;
  Matrix omega_bar;
};

struct TestOptions {
  double active_tol = 1e-7;
  RankTolerance rank_tol;
  /// Also compute the r and t degrees-of-freedom diagnostics.
  bool diagnostics = false;
  /// First-stage weight; identity when absent.
  std::optional<Matrix> upsilon;
  /// Added to the diagonal of Sigma~ before inversion. Zero means a
  /// near-singular Sigma~ is an error.
  double sigma_ridge = 0.0;
  /// Reference row for the refinement, -1 for the first nonzero active row.
  int reference_row = -1;
  VertexGuard guard;
};

namespace flag {
inline constexpr const char* kInfeasible = "infeasible";
inline constexpr const char* kRefined = "refined";
inline constexpr const char* kRgccFallback = "rgcc-fallback";
inline constexpr const char* kDofRSkipped = "dof-r-skipped";
}  // namespace flag

struct TestResult {
  double alpha = 0.05;
  double statistic = 0.0;
  int dof_s = 0;
  std::optional<int> dof_r;
  std::optional<int> dof_t;
  double critical_value = 0.0;
  std::optional<double> refined_level;
  bool reject = false;
  IndexSet active_set;
  Vector delta_tilde;
  Vector mu_hat;
  Vector delta_hat;
  Matrix sigma;  // Sigma~ used for the statistic
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

/// Throws Error(InvalidInput) naming the first violated invariant.
void validate(const ProblemSpec& spec, const Estimates& est);

/// C_bar = D + B Pi_bar.
Matrix c_bar(const ProblemSpec& spec, const Estimates& est);

/// First-stage restricted estimates (mu~, delta~), delta~ of minimum norm.
std::pair<Vector, Vector> stage1_estimate(const ProblemSpec& spec,
                                          const Estimates& est,
                                          const TestOptions& opt = {});

/// T_n = min n (mu_bar - mu)' sigma^{-1} (mu_bar - mu) over the sample
/// constraint set. Throws Error(SingularWeight) when sigma is not safely
/// positive definite.
std::pair<double, QpSolution> qlr_statistic(const ProblemSpec& spec,
                                            const Estimates& est,
                                            const Matrix& sigma,
                                            const TestOptions& opt = {});

/// s = rk(I_K [B, D]) - rk(I_K C_bar).
int dof_s(const ProblemSpec& spec, const Matrix& cbar, const IndexSet& active,
          RankTolerance tol = {});

/// Same rank difference over the rows carrying positive multipliers.
int dof_t(const ProblemSpec& spec, const Matrix& cbar, const Vector& psi,
          RankTolerance tol = {});

/// Rows of A active at mu_hat under the scaled tolerance.
IndexSet projected_active_rows(const ProjectedRep& rep, const Vector& mu_hat,
                               double tol);

/// rk of the rows of A = H B active at mu_hat. Throws Error(InvalidInput)
/// when vertex enumeration exceeds its guard.
int dof_r(const ProblemSpec& spec, const Matrix& cbar, const Vector& mu_hat,
          const TestOptions& opt = {});

TestResult gcc_test(const ProblemSpec& spec, const Estimates& est,
                    double alpha, const TestOptions& opt = {});

}  // namespace ineqgcc
