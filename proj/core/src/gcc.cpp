#include "ineqgcc/gcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ineqgcc/distributions.hpp"
#include "ineqgcc/error.hpp"

namespace ineqgcc {

namespace {

constexpr double kRejectSlack = 1e-8;
constexpr double kMaxCondition = 1e12;

IndexSet merge(IndexSet a, const IndexSet& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

int rank_difference(const ProblemSpec& spec, const Matrix& cbar,
                    const IndexSet& rows, RankTolerance tol) {
  if (rows.empty()) return 0;
  const Matrix bd = select_rows(hcat(spec.B, spec.D), rows);
  const Matrix cr = select_rows(cbar, rows);
  return rank(bd, tol) - rank(cr, tol);
}

QpProblem make_qp(const ProblemSpec& spec, const Estimates& est, Matrix weight,
                  const Matrix& cbar, double active_tol) {
  QpProblem p;
  p.weight = std::move(weight);
  p.center = est.mu_bar;
  p.B = spec.B;
  p.C = cbar;
  p.d = spec.d;
  p.active_tol = active_tol;
  return p;
}

// n * sigma^{-1} through an eigendecomposition, refusing near-singular sigma.
Matrix weight_from_sigma(const Matrix& sigma, int n, const TestOptions& opt) {
  require(sigma.rows() == sigma.cols(), "sigma must be square");
  Matrix s = 0.5 * (sigma + sigma.transpose());
  if (opt.sigma_ridge > 0.0) s.diagonal().array() += opt.sigma_ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Vector& lam = eig.eigenvalues();
  const double lmin = lam.minCoeff();
  const double lmax = lam.maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kMaxCondition) {
    std::ostringstream msg;
    msg << "Sigma~ is not safely positive definite (eigenvalues in [" << lmin
        << ", " << lmax << "])";
    fail(ErrorKind::SingularWeight, msg.str());
  }
  const Matrix& V = eig.eigenvectors();
  Matrix w = V * (static_cast<double>(n) * lam.cwiseInverse()).asDiagonal() *
             V.transpose();
  return 0.5 * (w + w.transpose());
}

}  // namespace

bool TestResult::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

void validate(const ProblemSpec& spec, const Estimates& est) {
  const Eigen::Index dc = spec.d.size();
  const Eigen::Index dm = spec.B.cols();
  const Eigen::Index dd = spec.D.cols();
  require(spec.n >= 1, "n must be at least 1");
  require(dm >= 1, "B must have at least one column (d_mu >= 1)");
  require(spec.B.rows() == dc, "B must have d_C = len(d) rows");
  require(spec.D.rows() == dc || dd == 0, "D must have d_C = len(d) rows");
  require(all_finite(spec.B) && all_finite(spec.D) && all_finite(spec.d),
          "B, D and d must be finite");
  for (int j : spec.eq_indices) {
    require(j >= 0 && j < dc, "eq_indices must be valid 0-based row indices");
  }
  require(est.mu_bar.size() == dm, "mu_bar must have length d_mu");
  require(est.pi_bar.rows() == dm && est.pi_bar.cols() == dd,
          "Pi_bar must be d_mu x d_delta");
  const Eigen::Index side = dm * (1 + dd);
  require(est.omega_bar.rows() == side && est.omega_bar.cols() == side,
          "Omega must be square of side d_mu*(1+d_delta)");
  require(all_finite(est.mu_bar) && all_finite(est.pi_bar) &&
              all_finite(est.omega_bar),
          "mu_bar, Pi_bar and Omega must be finite");
  const double scale = std::max(1.0, est.omega_bar.cwiseAbs().maxCoeff());
  require((est.omega_bar - est.omega_bar.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * scale,
          "Omega must be symmetric");
  const double trace = est.omega_bar.trace();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(est.omega_bar, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(trace, 0.0),
          "Omega must be positive semidefinite");
}

Matrix c_bar(const ProblemSpec& spec, const Estimates& est) {
  Matrix c = spec.B * est.pi_bar;
  if (spec.D.cols() > 0) c += spec.D;
  return c;
}

std::pair<Vector, Vector> stage1_estimate(const ProblemSpec& spec,
                                          const Estimates& est,
                                          const TestOptions& opt) {
  const Matrix cbar = c_bar(spec, est);
  const Eigen::Index dm = spec.d_mu();
  Matrix ups = opt.upsilon ? *opt.upsilon : Matrix::Identity(dm, dm);
  require(ups.rows() == dm && ups.cols() == dm, "upsilon must be d_mu x d_mu");
  const QpSolution s = solve_restricted_qp(make_qp(spec, est, ups, cbar, opt.active_tol));
  const Vector mu_tilde = s.mu_hat;
  if (cbar.cols() == 0) return {mu_tilde, Vector(0)};

  // The delta set at mu~ can be a single point; relax it by a hair so that
  // solver round-off in mu~ does not make it empty.
  const Vector b = spec.d - spec.B * mu_tilde;
  for (double relax = 1e-9; relax <= 1e-5; relax *= 100.0) {
    const Vector slack = relax * (Vector::Ones(b.size()) + b.cwiseAbs());
    try {
      return {mu_tilde, min_norm_point(cbar, b + slack)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
    }
  }
  fail(ErrorKind::SolverFailure,
       "stage1_estimate: no delta is feasible at the restricted mu estimate");
}

std::pair<double, QpSolution> qlr_statistic(const ProblemSpec& spec,
                                            const Estimates& est,
                                            const Matrix& sigma,
                                            const TestOptions& opt) {
  require(sigma.rows() == spec.d_mu(), "sigma must be d_mu x d_mu");
  const Matrix w = weight_from_sigma(sigma, spec.n, opt);
  const Matrix cbar = c_bar(spec, est);
  QpSolution sol = solve_restricted_qp(make_qp(spec, est, w, cbar, opt.active_tol));
  return {sol.objective, std::move(sol)};
}

int dof_s(const ProblemSpec& spec, const Matrix& cbar, const IndexSet& active,
          RankTolerance tol) {
  return rank_difference(spec, cbar, active, tol);
}

int dof_t(const ProblemSpec& spec, const Matrix& cbar, const Vector& psi,
          RankTolerance tol) {
  IndexSet support;
  if (psi.size() > 0) {
    const double cut = 1e-8 * psi.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      if (psi(j) > cut) support.push_back(static_cast<int>(j));
    }
  }
  return rank_difference(spec, cbar, support, tol);
}

IndexSet projected_active_rows(const ProjectedRep& rep, const Vector& mu_hat,
                               double tol) {
  IndexSet out;
  const double mnorm = mu_hat.norm();
  for (Eigen::Index j = 0; j < rep.A.rows(); ++j) {
    const double lhs = rep.A.row(j).dot(mu_hat);
    const double scale = 1.0 + std::abs(rep.g(j)) + rep.A.row(j).norm() * mnorm;
    if (std::abs(lhs - rep.g(j)) <= tol * scale) out.push_back(static_cast<int>(j));
  }
  return out;
}

int dof_r(const ProblemSpec& spec, const Matrix& cbar, const Vector& mu_hat,
          const TestOptions& opt) {
  const ProjectedRep rep = project_polyhedron(spec.B, cbar, spec.d, opt.guard);
  const IndexSet rows = projected_active_rows(rep, mu_hat, opt.active_tol);
  if (rows.empty()) return 0;
  return rank(select_rows(rep.A, rows), opt.rank_tol);
}

TestResult gcc_test(const ProblemSpec& spec, const Estimates& est, double alpha,
                    const TestOptions& opt) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::InvalidInput, "alpha must lie in (0, 1)");
  }
  validate(spec, est);

  TestResult r;
  r.alpha = alpha;
  std::pair<Vector, Vector> stage1;
  try {
    stage1 = stage1_estimate(spec, est, opt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible) throw;
    r.statistic = std::numeric_limits<double>::infinity();
    r.critical_value = 0.0;
    r.reject = true;
    r.flags.push_back(flag::kInfeasible);
    return r;
  }
  r.delta_tilde = stage1.second;
  r.sigma = sigma_tilde(est.omega_bar, r.delta_tilde, static_cast<int>(spec.d_mu()));

  const Matrix cbar = c_bar(spec, est);
  auto [t, sol] = qlr_statistic(spec, est, r.sigma, opt);
  r.statistic = t;
  r.mu_hat = sol.mu_hat;
  r.delta_hat = sol.delta_hat;
  r.active_set = merge(sol.active_set, spec.eq_indices);
  r.dof_s = dof_s(spec, cbar, r.active_set, opt.rank_tol);
  r.critical_value = cv(r.dof_s, alpha);
  r.reject = r.statistic > r.critical_value + kRejectSlack;

  if (opt.diagnostics) {
    const QpProblem p = make_qp(spec, est, weight_from_sigma(r.sigma, spec.n, opt),
                                cbar, opt.active_tol);
    r.dof_t = dof_t(spec, cbar, min_norm_multipliers(p, sol, r.active_set), opt.rank_tol);
    try {
      r.dof_r = dof_r(spec, cbar, r.mu_hat, opt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidInput) throw;
      r.flags.push_back(flag::kDofRSkipped);
    }
  }
  return r;
}

}  // namespace ineqgcc
