#include "ineqgcc/rgcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ineqgcc/distributions.hpp"
#include "ineqgcc/error.hpp"

namespace ineqgcc {

double tau_inactivity(const ProjectedRep& rep, const Matrix& sigma,
                      const Vector& mu_hat, int n, int ref_row, int j) {
  require(ref_row >= 0 && ref_row < rep.A.rows() && j >= 0 && j < rep.A.rows(),
          "tau_inactivity: row index out of range");
  const Vector a1 = rep.A.row(ref_row).transpose();
  const Vector aj = rep.A.row(j).transpose();
  const double n1 = std::sqrt(std::max(a1.dot(sigma * a1), 0.0));
  if (!(n1 > 0.0)) fail(ErrorKind::InvalidInput, "tau_inactivity: zero reference row");
  const double nj = std::sqrt(std::max(aj.dot(sigma * aj), 0.0));
  const double denom = n1 * nj - a1.dot(sigma * aj);
  // Parallel rows give a denominator that is zero up to round-off.
  if (denom <= 1e-12 * n1 * std::max(nj, n1)) {
    return std::numeric_limits<double>::infinity();
  }
  const double slack = std::max(rep.g(j) - aj.dot(mu_hat), 0.0);
  return std::sqrt(static_cast<double>(n)) * n1 * slack / denom;
}

int default_reference_row(const ProjectedRep& rep, const IndexSet& active_rows) {
  for (int j : active_rows) {
    if (rep.A.row(j).norm() > 0.0) return j;
  }
  return -1;
}

double refined_level(const ProjectedRep& rep, const Matrix& sigma,
                     const Vector& mu_hat, int n, int r_hat, double alpha,
                     const IndexSet& active_rows, int ref_row) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    fail(ErrorKind::InvalidInput, "refined_level: alpha must lie in (0, 0.5)");
  }
  if (r_hat != 1) return alpha;
  if (ref_row < 0) ref_row = default_reference_row(rep, active_rows);
  if (ref_row < 0) {
    fail(ErrorKind::Internal, "refined_level: r = 1 but no nonzero active row");
  }
  double tau = std::numeric_limits<double>::infinity();
  for (int j = 0; j < rep.A.rows(); ++j) {
    if (j == ref_row) continue;
    tau = std::min(tau, tau_inactivity(rep, sigma, mu_hat, n, ref_row, j));
  }
  return std::clamp(2.0 * alpha * normal_cdf(tau), alpha, 2.0 * alpha);
}

TestResult rgcc_refine(const ProblemSpec& spec, const Estimates& est,
                       const TestResult& gcc, const TestOptions& opt) {
  TestResult r = gcc;
  if (r.has_flag(flag::kInfeasible) || r.dof_s != 1) return r;
  const double alpha = r.alpha;
  if (r.statistic < cv(1, 2.0 * alpha) || r.statistic > cv(1, alpha)) return r;

  const Matrix cbar = c_bar(spec, est);
  ProjectedRep rep;
  try {
    rep = project_polyhedron(spec.B, cbar, spec.d, opt.guard);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidInput) throw;
    r.flags.push_back(flag::kRgccFallback);
    return r;
  }
  const IndexSet rows = projected_active_rows(rep, r.mu_hat, opt.active_tol);
  const int r_hat = rows.empty() ? 0 : rank(select_rows(rep.A, rows), opt.rank_tol);
  r.dof_r = r_hat;
  const double beta = refined_level(rep, r.sigma, r.mu_hat, spec.n, r_hat, alpha,
                                    rows, opt.reference_row);
  r.refined_level = beta;
  r.critical_value = cv(1, beta);
  r.reject = r.statistic > r.critical_value + 1e-8;
  r.flags.push_back(flag::kRefined);
  return r;
}

TestResult rgcc_test(const ProblemSpec& spec, const Estimates& est,
                     double alpha, const TestOptions& opt) {
  return rgcc_refine(spec, est, gcc_test(spec, est, alpha, opt), opt);
}

}  // namespace ineqgcc
