#include "ineqgcc/qp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ineqgcc/error.hpp"

namespace ineqgcc {

namespace {

constexpr double kDeltaRidge = 1e-10;
constexpr int kMaxIpmIterations = 200;

std::atomic<std::uint64_t> g_solves{0};
std::atomic<std::uint64_t> g_polish_failures{0};
std::atomic<double> g_worst_residual{0.0};

void record_solve(double normalized_residual, bool polished) {
  g_solves.fetch_add(1, std::memory_order_relaxed);
  if (!polished) g_polish_failures.fetch_add(1, std::memory_order_relaxed);
  double cur = g_worst_residual.load(std::memory_order_relaxed);
  while (normalized_residual > cur &&
         !g_worst_residual.compare_exchange_weak(cur, normalized_residual,
                                                 std::memory_order_relaxed)) {
  }
}

double inf_norm(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// min 0.5 x'Hx + f'x  s.t.  A x <= b, H positive definite.
struct Ipm {
  Matrix H;
  Vector f;
  Matrix A;
  Vector b;
};

struct IpmResult {
  Vector x;
  Vector s;
  Vector z;
  bool converged = false;
  int iterations = 0;
};

double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

// Mehrotra predictor-corrector on the slack form A x + s = b, s, z >= 0.
IpmResult ipm_solve(const Ipm& q, const Vector& x_start, int max_iter) {
  const Eigen::Index n = q.H.rows();
  const Eigen::Index m = q.A.rows();
  IpmResult out;
  if (m == 0) {
    out.x = q.H.ldlt().solve(-q.f);
    out.s = Vector(0);
    out.z = Vector(0);
    out.converged = out.x.allFinite();
    return out;
  }

  Vector x = x_start;
  Vector s = (q.b - q.A * x).cwiseMax(1.0);
  Vector z = Vector::Ones(m);

  // Loose enough to stop before the barrier system becomes too ill-conditioned
  // to make progress; the active-set polish restores full accuracy.
  const double tol_d = 1e-9 * (1.0 + inf_norm(q.f));
  const double tol_p = 1e-9 * (1.0 + inf_norm(q.b));
  const double tol_mu = 1e-12;

  Matrix M(n, n);
  Eigen::LLT<Matrix> llt;
  Eigen::LDLT<Matrix> ldlt;
  bool use_ldlt = false;

  auto newton = [&](const Vector& r_d, const Vector& r_p, const Vector& r_c,
                    Vector& dx, Vector& ds, Vector& dz) {
    const Vector t = (r_c - z.cwiseProduct(r_p)).cwiseQuotient(s);
    const Vector rhs = -r_d + q.A.transpose() * t;
    dx = use_ldlt ? Vector(ldlt.solve(rhs)) : Vector(llt.solve(rhs));
    ds = -r_p - q.A * dx;
    dz = (-r_c - z.cwiseProduct(ds)).cwiseQuotient(s);
  };

  double best_merit = std::numeric_limits<double>::infinity();
  Vector best_x = x, best_s = s, best_z = z;

  int it = 0;
  for (; it < max_iter; ++it) {
    const Vector r_d = q.H * x + q.f + q.A.transpose() * z;
    const Vector r_p = q.A * x + s - q.b;
    const double mu = s.dot(z) / static_cast<double>(m);
    if (inf_norm(r_d) <= tol_d && inf_norm(r_p) <= tol_p && mu <= tol_mu) {
      out.converged = true;
      break;
    }
    const double merit =
        std::max({inf_norm(r_d) / tol_d, inf_norm(r_p) / tol_p, mu / tol_mu});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best_s = s;
      best_z = z;
    }
    // With large multipliers the normal equations lose the last digits of
    // the dual residual; once the barrier is gone further steps cannot help.
    if (mu <= 1e-6 * tol_mu * tol_mu) break;

    const Vector d = z.cwiseQuotient(s);
    const Matrix Ad = q.A.array().colwise() * d.array().sqrt();
    M = q.H;
    M.noalias() += Ad.transpose() * Ad;
    llt.compute(M);
    use_ldlt = llt.info() != Eigen::Success;
    if (use_ldlt) {
      M.diagonal().array() += 1e-14 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(M);
      if (ldlt.info() != Eigen::Success) break;
    }

    Vector dx, ds, dz;
    const Vector rc_aff = s.cwiseProduct(z);
    newton(r_d, r_p, rc_aff, dx, ds, dz);
    const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff =
        (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(m);
    const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);

    const Vector rc = rc_aff + ds.cwiseProduct(dz) -
                      Vector::Constant(m, sigma * mu);
    newton(r_d, r_p, rc, dx, ds, dz);
    const double a_max = std::min(max_step(s, ds), max_step(z, dz));
    const double alpha = std::min(1.0, 0.995 * a_max);

    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
    if (!x.allFinite() || !s.allFinite() || !z.allFinite() ||
        inf_norm(x) > 1e15 || inf_norm(z) > 1e15) {
      break;
    }
  }
  out.iterations = it;
  if (out.converged) {
    out.x = std::move(x);
    out.s = std::move(s);
    out.z = std::move(z);
  } else {
    out.x = std::move(best_x);
    out.s = std::move(best_s);
    out.z = std::move(best_z);
  }
  return out;
}

// Scaled working copy of a QpProblem: zero rows dropped, remaining rows
// normalized, objective divided by the largest entry of 2W.
struct Scaled {
  Eigen::Index d_mu = 0;
  Eigen::Index d_delta = 0;
  double w = 1.0;
  std::vector<int> rows;  // original index of each kept row
  Vector row_norm;        // norm of each kept row
  Matrix A;
  Vector b;
  Matrix H0;  // exact Hessian (zero delta block), scaled
  Vector f;
};

Scaled scale_problem(const QpProblem& p) {
  Scaled sc;
  sc.d_mu = p.weight.rows();
  sc.d_delta = p.C.cols();
  const Eigen::Index n = sc.d_mu + sc.d_delta;
  const Eigen::Index m = p.d.size();

  sc.w = std::max(2.0 * p.weight.cwiseAbs().maxCoeff(),
                  std::numeric_limits<double>::min());
  sc.H0 = Matrix::Zero(n, n);
  sc.H0.topLeftCorner(sc.d_mu, sc.d_mu) = (2.0 / sc.w) * p.weight;
  sc.f = Vector::Zero(n);
  sc.f.head(sc.d_mu) = -(2.0 / sc.w) * (p.weight * p.center);

  std::vector<int> kept;
  std::vector<double> norms;
  for (Eigen::Index j = 0; j < m; ++j) {
    double nrm2 = p.B.row(j).squaredNorm();
    if (sc.d_delta > 0) nrm2 += p.C.row(j).squaredNorm();
    const double nrm = std::sqrt(nrm2);
    if (nrm == 0.0) {
      if (p.d(j) < -1e-12) {
        std::ostringstream msg;
        msg << "constraint row " << j << " reads 0 <= " << p.d(j)
            << " (Farkas ray e_" << j << ")";
        fail(ErrorKind::Infeasible, msg.str());
      }
      continue;
    }
    kept.push_back(static_cast<int>(j));
    norms.push_back(nrm);
  }
  const Eigen::Index k = static_cast<Eigen::Index>(kept.size());
  sc.rows = kept;
  sc.row_norm.resize(k);
  sc.A.resize(k, n);
  sc.b.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const int j = kept[static_cast<std::size_t>(i)];
    const double nrm = norms[static_cast<std::size_t>(i)];
    sc.row_norm(i) = nrm;
    sc.A.row(i).head(sc.d_mu) = p.B.row(j) / nrm;
    if (sc.d_delta > 0) sc.A.row(i).tail(sc.d_delta) = p.C.row(j) / nrm;
    sc.b(i) = p.d(j) / nrm;
  }
  return sc;
}

struct Polished {
  bool ok = false;
  Vector x;
  Vector psi;  // scaled multipliers over kept rows
};

// Re-solve the exact KKT system with the rows in K held as equalities. The
// minimum-norm solution picks the smallest delta on the optimal face. Rows whose
// multiplier comes out negative are released and violated rows are added
// until the candidate satisfies every KKT condition.
Polished polish(const Scaled& sc, const Vector& s_ipm, const Vector& z_ipm) {
  const Eigen::Index n = sc.H0.rows();
  const Eigen::Index m = sc.A.rows();
  std::vector<char> in_k(static_cast<std::size_t>(m), 0);
  for (Eigen::Index j = 0; j < m; ++j) {
    const bool strongly = s_ipm(j) < z_ipm(j);
    const bool tight = s_ipm(j) <= 1e-6 * (1.0 + std::abs(sc.b(j)));
    in_k[static_cast<std::size_t>(j)] = strongly || tight;
  }

  Polished out;
  const int max_rounds = static_cast<int>(2 * m + 10);
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> K;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_k[static_cast<std::size_t>(j)]) K.push_back(static_cast<int>(j));
    }
    const Eigen::Index k = static_cast<Eigen::Index>(K.size());
    const Matrix AK = select_rows(sc.A, K);
    Matrix kkt = Matrix::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = sc.H0;
    kkt.topRightCorner(n, k) = AK.transpose();
    kkt.bottomLeftCorner(k, n) = AK;
    Vector rhs(n + k);
    rhs.head(n) = -sc.f;
    rhs.tail(k) = select_rows(sc.b, K);

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
    const Vector sol = cod.solve(rhs);
    const double resid = inf_norm(kkt * sol - rhs);
    const Vector x = sol.head(n);
    const Vector psi = sol.tail(k);
    const double xscale = 1.0 + inf_norm(x);

    if (!(resid <= 1e-10 * (1.0 + inf_norm(rhs) + inf_norm(sc.f)) * xscale)) {
      // Inconsistent equality set: release the weakest member (largest
      // interior-point slack relative to its multiplier).
      int drop = -1;
      double worst = -1.0;
      for (int j : K) {
        const double score = s_ipm(j) / (z_ipm(j) + 1e-300);
        if (score > worst) {
          worst = score;
          drop = j;
        }
      }
      if (drop < 0) return out;
      in_k[static_cast<std::size_t>(drop)] = 0;
      continue;
    }

    const double psi_scale = std::max(1.0, inf_norm(psi));
    int neg = -1;
    double most_neg = -1e-9 * psi_scale;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (psi(i) < most_neg) {
        most_neg = psi(i);
        neg = K[static_cast<std::size_t>(i)];
      }
    }
    if (neg >= 0) {
      in_k[static_cast<std::size_t>(neg)] = 0;
      continue;
    }

    const Vector slack = sc.b - sc.A * x;
    int viol = -1;
    double most_viol = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_k[static_cast<std::size_t>(j)]) continue;
      const double tol = 1e-10 * (1.0 + std::abs(sc.b(j)) + inf_norm(x));
      if (slack(j) < -tol && slack(j) < most_viol) {
        most_viol = slack(j);
        viol = static_cast<int>(j);
      }
    }
    if (viol >= 0) {
      in_k[static_cast<std::size_t>(viol)] = 1;
      continue;
    }

    out.ok = true;
    out.x = x;
    out.psi = Vector::Zero(m);
    for (Eigen::Index i = 0; i < k; ++i) {
      out.psi(K[static_cast<std::size_t>(i)]) = std::max(psi(i), 0.0);
    }
    return out;
  }
  return out;
}

void validate(const QpProblem& p) {
  const Eigen::Index dm = p.weight.rows();
  require(p.weight.cols() == dm, "QpProblem: weight must be square");
  require(p.center.size() == dm, "QpProblem: center length must equal d_mu");
  require(p.B.cols() == dm, "QpProblem: B must have d_mu columns");
  require(p.B.rows() == p.d.size(), "QpProblem: B and d row counts differ");
  require(p.C.rows() == p.d.size() || p.C.cols() == 0,
          "QpProblem: C and d row counts differ");
  require(p.active_tol > 0.0, "QpProblem: active_tol must be positive");
  require(all_finite(p.weight) && all_finite(p.center) && all_finite(p.B) &&
              all_finite(p.C) && all_finite(p.d),
          "QpProblem: non-finite entry");
  const double wmax = p.weight.cwiseAbs().maxCoeff();
  require(dm == 0 || wmax > 0.0, "QpProblem: weight is zero");
  require((p.weight - p.weight.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, wmax),
          "QpProblem: weight must be symmetric");
}

Matrix constraint_matrix(const QpProblem& p) {
  if (p.C.cols() == 0) return p.B;
  return hcat(p.B, p.C);
}

// Phase 1: min ||u||^2 over A x - u <= b. A positive optimum certifies
// infeasibility; u / sum(u) is then a Farkas ray.
void certify_infeasible_or_throw(const Scaled& sc, const Vector& x_start) {
  const Eigen::Index n = sc.A.cols();
  const Eigen::Index m = sc.A.rows();
  Ipm q;
  q.H = Matrix::Zero(n + m, n + m);
  q.H.topLeftCorner(n, n).diagonal().setConstant(1e-12);
  q.H.bottomRightCorner(m, m).diagonal().setConstant(2.0);
  q.f = Vector::Zero(n + m);
  q.A.resize(m, n + m);
  q.A.leftCols(n) = sc.A;
  q.A.rightCols(m) = -Matrix::Identity(m, m);
  q.b = sc.b;
  Vector start(n + m);
  start.head(n) = x_start;
  start.tail(m) = (sc.A * x_start - sc.b).cwiseMax(0.0) + Vector::Ones(m);
  const IpmResult r = ipm_solve(q, start, kMaxIpmIterations);
  if (!r.converged) {
    fail(ErrorKind::SolverFailure,
         "qp: interior point failed and phase-1 feasibility solve did not converge");
  }
  const Vector u = r.x.tail(m).cwiseMax(0.0);
  const double usum = u.sum();
  if (inf_norm(u) > 1e-9 * (1.0 + inf_norm(sc.b)) && usum > 0.0) {
    const Vector y = u / usum;
    const double ray = inf_norm(sc.A.transpose() * y);
    const double gap = sc.b.dot(y);
    if (ray <= 1e-6 && gap < 0.0) {
      std::ostringstream msg;
      msg << "constraint set is empty (Farkas ray: |A'y| = " << ray
          << ", b'y = " << gap << ")";
      fail(ErrorKind::Infeasible, msg.str());
    }
  }
}

}  // namespace

// Each condition is measured relative to the size of its own terms:
// stationarity against wscale (1 + |x|), primal rows against
// |d_j| + |row_j| (1 + |x|), and complementarity against the product of the
// two, with x = (mu, delta) and wscale the largest entry of 2W.
double kkt_residual(const QpProblem& p, const QpSolution& s) {
  const Eigen::Index m = p.d.size();
  const double wscale = std::max(1.0, 2.0 * p.weight.cwiseAbs().maxCoeff());
  const double xnorm =
      1.0 + std::sqrt(s.mu_hat.squaredNorm() + s.delta_hat.squaredNorm());
  const double dual_scale = wscale * xnorm;
  double r = 0.0;
  Vector stat_mu = 2.0 * p.weight * (s.mu_hat - p.center);
  if (m > 0) stat_mu += p.B.transpose() * s.psi_hat;
  r = std::max(r, inf_norm(stat_mu) / dual_scale);
  if (p.C.cols() > 0 && m > 0) {
    r = std::max(r, inf_norm(p.C.transpose() * s.psi_hat) / dual_scale);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    double lhs = p.B.row(j).dot(s.mu_hat);
    double nrm2 = p.B.row(j).squaredNorm();
    if (p.C.cols() > 0) {
      lhs += p.C.row(j).dot(s.delta_hat);
      nrm2 += p.C.row(j).squaredNorm();
    }
    const double nrm = std::max(std::sqrt(nrm2), 1.0);
    const double row_scale = std::abs(p.d(j)) + nrm * xnorm;
    const double slack = p.d(j) - lhs;
    r = std::max(r, std::max(-slack, 0.0) / row_scale);
    r = std::max(r, std::max(-s.psi_hat(j), 0.0) * nrm / dual_scale);
    r = std::max(r, std::abs(s.psi_hat(j) * slack) / (dual_scale * row_scale / nrm));
  }
  return r;
}

IndexSet detect_active_set(const QpProblem& p, const Vector& mu,
                           const Vector& delta, double tol) {
  IndexSet out;
  const double xnorm = std::sqrt(mu.squaredNorm() + delta.squaredNorm());
  for (Eigen::Index j = 0; j < p.d.size(); ++j) {
    double lhs = p.B.row(j).dot(mu);
    double nrm2 = p.B.row(j).squaredNorm();
    if (p.C.cols() > 0) {
      lhs += p.C.row(j).dot(delta);
      nrm2 += p.C.row(j).squaredNorm();
    }
    const double scale = 1.0 + std::abs(p.d(j)) + std::sqrt(nrm2) * xnorm;
    if (std::abs(lhs - p.d(j)) <= tol * scale) out.push_back(static_cast<int>(j));
  }
  return out;
}

QpSolution solve_restricted_qp(const QpProblem& p) {
  validate(p);
  const Scaled sc = scale_problem(p);
  const Eigen::Index n = sc.d_mu + sc.d_delta;

  Ipm q;
  q.H = sc.H0;
  q.H.bottomRightCorner(sc.d_delta, sc.d_delta).diagonal().setConstant(kDeltaRidge);
  q.f = sc.f;
  q.A = sc.A;
  q.b = sc.b;

  Vector start = Vector::Zero(n);
  start.head(sc.d_mu) = p.center;
  // An unconverged run still hands back its best iterate. The polish either
  // certifies it through the KKT conditions or the run counts as a failure.
  IpmResult r = ipm_solve(q, start, kMaxIpmIterations);
  Polished pol;
  if (sc.A.rows() > 0 && r.x.allFinite()) pol = polish(sc, r.s, r.z);
  if (!r.converged && !pol.ok) {
    certify_infeasible_or_throw(sc, start);
    // Feasible after all: retry with a larger budget.
    r = ipm_solve(q, start, 4 * kMaxIpmIterations);
    if (sc.A.rows() > 0 && r.x.allFinite()) pol = polish(sc, r.s, r.z);
    if (!r.converged && !pol.ok) {
      fail(ErrorKind::SolverFailure,
           "qp: interior point did not converge on a feasible problem");
    }
  }

  Vector x = r.x;
  Vector psi_scaled = r.z;
  bool polished = false;
  if (pol.ok) {
    x = pol.x;
    psi_scaled = pol.psi;
    polished = true;
  } else if (sc.A.rows() == 0) {
    // Unconstrained: mu = center exactly, delta = 0 (minimum norm).
    x.head(sc.d_mu) = p.center;
    x.tail(sc.d_delta).setZero();
    polished = true;
  }

  QpSolution out;
  out.mu_hat = x.head(sc.d_mu);
  out.delta_hat = x.tail(sc.d_delta);
  out.psi_hat = Vector::Zero(p.d.size());
  for (Eigen::Index i = 0; i < sc.A.rows(); ++i) {
    out.psi_hat(sc.rows[static_cast<std::size_t>(i)]) =
        psi_scaled(i) * sc.w / sc.row_norm(i);
  }
  const Vector diff = out.mu_hat - p.center;
  out.objective = std::max(0.0, diff.dot(p.weight * diff));
  out.active_set = detect_active_set(p, out.mu_hat, out.delta_hat, p.active_tol);
  out.iterations = r.iterations;
  out.polished = polished;
  out.kkt_residual = kkt_residual(p, out);

  const double normalized = out.kkt_residual / (1.0 + inf_norm(p.center));
  record_solve(normalized, polished);
  if (!(normalized <= 1e-6)) {
    std::ostringstream msg;
    msg << "qp: KKT residual " << out.kkt_residual << " after "
        << r.iterations << " interior-point iterations";
    fail(ErrorKind::SolverFailure, msg.str());
  }
  return out;
}

Vector min_norm_point(const Matrix& C, const Vector& b) {
  require(C.rows() == b.size(), "min_norm_point: C and b row counts differ");
  QpProblem p;
  p.weight = Matrix::Identity(C.cols(), C.cols());
  p.center = Vector::Zero(C.cols());
  p.B = C;
  p.C = Matrix(C.rows(), 0);
  p.d = b;
  return solve_restricted_qp(p).mu_hat;
}

Vector min_norm_multipliers(const QpProblem& p, const QpSolution& s,
                            const IndexSet& active) {
  const Eigen::Index dm = p.weight.rows();
  const Eigen::Index dd = p.C.cols();
  const Eigen::Index m = p.d.size();
  const Eigen::Index k = static_cast<Eigen::Index>(active.size());

  Vector r = Vector::Zero(dm + dd);
  r.head(dm) = 2.0 * p.weight * (p.center - s.mu_hat);
  const double rscale = std::max(1.0, inf_norm(r));
  Vector psi = Vector::Zero(m);
  const double wscale = std::max(1.0, 2.0 * p.weight.cwiseAbs().maxCoeff());
  // An interior solution leaves only rounding noise in r; projecting that
  // noise onto a degenerate cone of active rows can look infeasible.
  if (inf_norm(r) <= 1e-10 * wscale) return psi;
  if (k == 0) {
    if (inf_norm(r) > 1e-7 * wscale) {
      fail(ErrorKind::SolverFailure,
           "min_norm_multipliers: stationarity needs a binding row but none is active");
    }
    return psi;
  }

  // E psi_K = r with E = [B_K; C_K]'.
  Matrix E(dm + dd, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const int j = active[static_cast<std::size_t>(i)];
    E.col(i).head(dm) = p.B.row(j).transpose();
    if (dd > 0) E.col(i).tail(dd) = p.C.row(j).transpose();
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(E);
  const Vector psi0 = cod.solve(r);
  if (inf_norm(E * psi0 - r) > 1e-7 * rscale) {
    fail(ErrorKind::SolverFailure,
         "min_norm_multipliers: KKT stationarity system is inconsistent");
  }

  // psi0 lies in the row space of E, so |psi0 + N z|^2 = |psi0|^2 + |z|^2
  // and the problem reduces to a minimum-norm point over -N z <= psi0.
  const Matrix N = null_space(E);
  Vector psiK = psi0;
  if (N.cols() > 0) {
    psiK = psi0 + N * min_norm_point(-N, psi0);
  }
  const double tol = 1e-9 * std::max(1.0, inf_norm(psiK));
  if (psiK.size() > 0 && psiK.minCoeff() < -tol) {
    fail(ErrorKind::SolverFailure,
         "min_norm_multipliers: no nonnegative multiplier on the given active set");
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    psi(active[static_cast<std::size_t>(i)]) = std::max(psiK(i), 0.0);
  }
  return psi;
}

QpSolution brute_force_qp(const QpProblem& p) {
  validate(p);
  const Eigen::Index dm = p.weight.rows();
  const Eigen::Index dd = p.C.cols();
  const Eigen::Index n = dm + dd;
  const Eigen::Index m = p.d.size();
  if (m > 12 || n > 8) {
    fail(ErrorKind::InvalidInput,
         "brute_force_qp: limited to d_C <= 12 and d_mu + d_delta <= 8");
  }
  const Matrix A = constraint_matrix(p);
  Matrix H = Matrix::Zero(n, n);
  H.topLeftCorner(dm, dm) = 2.0 * p.weight;
  Vector g = Vector::Zero(n);
  g.head(dm) = 2.0 * p.weight * p.center;

  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  Vector best_x;
  std::vector<int> K;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    K.clear();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (mask & (1u << j)) K.push_back(static_cast<int>(j));
    }
    const Eigen::Index k = static_cast<Eigen::Index>(K.size());
    const Matrix AK = select_rows(A, K);
    Matrix kkt = Matrix::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = H;
    kkt.topRightCorner(n, k) = AK.transpose();
    kkt.bottomLeftCorner(k, n) = AK;
    Vector rhs(n + k);
    rhs.head(n) = g;
    rhs.tail(k) = select_rows(p.d, K);
    const Vector sol = pinv(kkt) * rhs;
    if (inf_norm(kkt * sol - rhs) > 1e-9 * (1.0 + inf_norm(rhs))) continue;
    const Vector x = sol.head(n);
    const Vector lhs = A * x;
    bool feasible = true;
    for (Eigen::Index j = 0; j < m && feasible; ++j) {
      feasible = lhs(j) <= p.d(j) + 1e-10 * (1.0 + std::abs(p.d(j)));
    }
    if (!feasible) continue;
    const Vector diff = x.head(dm) - p.center;
    const double obj = diff.dot(p.weight * diff);
    if (obj < best) {
      best = obj;
      best_x = x;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::Infeasible, "brute_force_qp: no feasible candidate");

  QpSolution out;
  out.mu_hat = best_x.head(dm);
  out.delta_hat = best_x.tail(dd);
  out.objective = std::max(0.0, best);
  out.active_set = detect_active_set(p, out.mu_hat, out.delta_hat, 1e-9);
  out.psi_hat = Vector::Zero(m);
  out.polished = true;

  // A basic nonnegative multiplier supported on some subset of the active
  // rows always exists at the optimum.
  const IndexSet& act = out.active_set;
  const Eigen::Index na = static_cast<Eigen::Index>(act.size());
  Vector r = Vector::Zero(n);
  r.head(dm) = 2.0 * p.weight * (p.center - out.mu_hat);
  for (std::uint32_t mask = 0; mask < (1u << na); ++mask) {
    std::vector<int> T;
    for (Eigen::Index i = 0; i < na; ++i) {
      if (mask & (1u << i)) T.push_back(act[static_cast<std::size_t>(i)]);
    }
    const Matrix ET = select_rows(A, T).transpose();
    const Vector psiT = T.empty() ? Vector(0) : Vector(pinv(ET) * r);
    const Vector res = T.empty() ? r : Vector(ET * psiT - r);
    if (inf_norm(res) > 1e-8 * (1.0 + inf_norm(r))) continue;
    if (psiT.size() > 0 && psiT.minCoeff() < -1e-10 * (1.0 + inf_norm(psiT))) continue;
    for (std::size_t i = 0; i < T.size(); ++i) {
      out.psi_hat(T[i]) = std::max(psiT(static_cast<Eigen::Index>(i)), 0.0);
    }
    break;
  }
  out.kkt_residual = kkt_residual(p, out);
  return out;
}

QpStats qp_stats() {
  QpStats s;
  s.solves = g_solves.load();
  s.polish_failures = g_polish_failures.load();
  s.worst_normalized_residual = g_worst_residual.load();
  return s;
}

void reset_qp_stats() {
  g_solves = 0;
  g_polish_failures = 0;
  g_worst_residual = 0.0;
}

}  // namespace ineqgcc
