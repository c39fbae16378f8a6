#include "ineqgcc/models.hpp"

#include <algorithm>
#include <map>

#include "ineqgcc/error.hpp"
#include "ineqgcc/parallel.hpp"
#include "ineqgcc/rng.hpp"

namespace ineqgcc {

namespace {

Matrix stacked(const MomentData& data) {
  const Eigen::Index n = data.g_obs.rows();
  Matrix X(n, data.g_obs.cols() + data.G_obs.cols());
  X.leftCols(data.g_obs.cols()) = data.g_obs;
  if (data.G_obs.cols() > 0) X.rightCols(data.G_obs.cols()) = data.G_obs;
  return X;
}

void check_moment_data(const MomentData& data) {
  const Eigen::Index n = data.g_obs.rows();
  const Eigen::Index dm = data.g_obs.cols();
  require(n >= 2, "moment data needs at least two observations");
  require(dm >= 1, "moment data needs at least one moment");
  require(data.d_delta >= 0, "d_delta must be nonnegative");
  require(data.G_obs.rows() == n || data.d_delta == 0,
          "G_obs must have one row per observation");
  require(data.G_obs.cols() == dm * data.d_delta,
          "G_obs rows must hold vec(G_i) of length d_mu * d_delta");
  require(data.cluster_ids.empty() ||
              data.cluster_ids.size() == static_cast<std::size_t>(n),
          "cluster_ids must have one entry per observation");
  require(all_finite(data.g_obs) && all_finite(data.G_obs),
          "moment data must be finite");
}

}  // namespace

ProblemSpec build_spec_test(int d_eq, int d_ineq, int n) {
  return build_subvector(d_eq, d_ineq, 0, n);
}

ProblemSpec build_subvector(int d_eq, int d_ineq, int d_delta, int n) {
  require(d_eq >= 0 && d_ineq >= 0 && d_delta >= 0, "counts must be nonnegative");
  require(d_eq + d_ineq >= 1, "at least one moment is required");
  const int dm = d_eq + d_ineq;
  const int dc = 2 * d_eq + d_ineq;
  ProblemSpec s;
  s.B = Matrix::Zero(dc, dm);
  s.B.topLeftCorner(d_eq, d_eq) = -Matrix::Identity(d_eq, d_eq);
  s.B.block(d_eq, 0, d_eq, d_eq) = Matrix::Identity(d_eq, d_eq);
  s.B.bottomRightCorner(d_ineq, d_ineq) = -Matrix::Identity(d_ineq, d_ineq);
  s.D = Matrix::Zero(dc, d_delta);
  s.d = Vector::Zero(dc);
  for (int j = 0; j < 2 * d_eq; ++j) s.eq_indices.push_back(j);
  s.n = n;
  return s;
}

Estimates LpTranslation::estimates(const Matrix& omega_source) const {
  require(omega_source.rows() == transform.cols() &&
              omega_source.cols() == transform.cols(),
          "LP translation: source covariance has the wrong side");
  Estimates e;
  e.mu_bar = mu_bar;
  e.pi_bar = pi_bar;
  e.omega_bar = transform * omega_source * transform.transpose();
  e.omega_bar = 0.5 * (e.omega_bar + e.omega_bar.transpose());
  return e;
}

LpTranslation build_lp_bounds(const LpModel& model, int n) {
  const Eigen::Index dg = model.Gamma.rows();
  const Eigen::Index dd = model.Gamma.cols();
  const Eigen::Index da = model.A.rows();
  require(model.m.size() == dg, "LP model: m must have d_Gamma entries");
  require(model.A.cols() == dd || da == 0, "LP model: A must have d_delta columns");
  require(model.b.size() == da, "LP model: b must have d_A entries");
  require(model.gamma.size() == dd,
          "LP model: gamma must have d_delta entries");

  const bool known = model.gamma_known;
  const Eigen::Index dm = known ? dg : dg + 1;
  const Eigen::Index off = known ? 0 : 1;  // column of the structural zero
  const Eigen::Index dc = 2 + 2 * dg + da;

  LpTranslation t;
  ProblemSpec& s = t.spec;
  s.n = n;
  s.B = Matrix::Zero(dc, dm);
  s.D = Matrix::Zero(dc, dd);
  if (!known) {
    s.B(0, 0) = 1.0;
    s.B(1, 0) = -1.0;
  } else {
    s.D.row(0) = model.gamma.transpose();
    s.D.row(1) = -model.gamma.transpose();
  }
  s.B.block(2, off, dg, dg) = Matrix::Identity(dg, dg);
  s.B.block(2 + dg, off, dg, dg) = -Matrix::Identity(dg, dg);
  if (da > 0) s.D.bottomRows(da) = model.A;
  s.d = Vector::Zero(dc);
  s.d(0) = model.theta;
  s.d(1) = -model.theta;
  if (da > 0) s.d.tail(da) = model.b;
  for (Eigen::Index j = 0; j < 2 + 2 * dg; ++j) s.eq_indices.push_back(static_cast<int>(j));
  t.d_slope = Vector::Zero(dc);
  t.d_slope(0) = 1.0;
  t.d_slope(1) = -1.0;

  // mu = (0?, -m), Pi = (gamma'?; Gamma).
  t.mu_bar = Vector::Zero(dm);
  t.mu_bar.tail(dg) = -model.m;
  t.pi_bar = Matrix::Zero(dm, dd);
  if (!known) t.pi_bar.row(0) = model.gamma.transpose();
  t.pi_bar.bottomRows(dg) = model.Gamma;

  // Source layout: m, [gamma], vec(Gamma). Target: mu, vec(Pi).
  const Eigen::Index src = dg + (known ? 0 : dd) + dg * dd;
  t.transform = Matrix::Zero(dm * (1 + dd), src);
  for (Eigen::Index i = 0; i < dg; ++i) t.transform(off + i, i) = -1.0;
  const Eigen::Index gamma_at = dg;
  const Eigen::Index vecg_at = dg + (known ? 0 : dd);
  for (Eigen::Index k = 0; k < dd; ++k) {
    const Eigen::Index col = dm * (1 + k);  // start of vec(Pi) column k
    if (!known) t.transform(col, gamma_at + k) = 1.0;
    for (Eigen::Index i = 0; i < dg; ++i) {
      t.transform(col + off + i, vecg_at + k * dg + i) = 1.0;
    }
  }
  return t;
}

Matrix reparameterize_null(const Matrix& Lambda) {
  require(all_finite(Lambda), "Lambda must be finite");
  require(Lambda.rows() >= 1 && Lambda.rows() < Lambda.cols(),
          "Lambda must be d_theta x d_beta with d_theta < d_beta");
  if (rank(Lambda) != Lambda.rows()) {
    fail(ErrorKind::InvalidInput, "Lambda must have full row rank");
  }
  return null_space(Lambda).transpose();
}

Estimates estimates_from_observations(const MomentData& data) {
  check_moment_data(data);
  const Eigen::Index n = data.g_obs.rows();
  const Eigen::Index dm = data.g_obs.cols();
  const Matrix X = stacked(data);
  const Vector mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());

  Estimates e;
  e.mu_bar = mean.head(dm);
  e.pi_bar = Matrix::Zero(dm, data.d_delta);
  for (int k = 0; k < data.d_delta; ++k) {
    e.pi_bar.col(k) = mean.segment(dm * (1 + k), dm);
  }
  e.omega_bar = std::move(cov);
  return e;
}

Matrix bootstrap_omega(const MomentData& data, int reps, std::uint64_t seed,
                       int threads) {
  check_moment_data(data);
  require(reps >= 2, "bootstrap needs at least two replicates");
  const Eigen::Index n = data.g_obs.rows();
  const Matrix X = stacked(data);
  const Eigen::Index p = X.cols();

  // Cluster sums and sizes, clusters ordered by label.
  std::map<std::int64_t, int> index;
  std::vector<int> member(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t id =
        data.cluster_ids.empty() ? static_cast<std::int64_t>(i)
                                 : data.cluster_ids[static_cast<std::size_t>(i)];
    index.emplace(id, 0);
  }
  int next = 0;
  for (auto& kv : index) kv.second = next++;
  const int nc = next;
  if (nc < 2) fail(ErrorKind::InvalidInput, "bootstrap needs at least two clusters");
  Matrix sums = Matrix::Zero(nc, p);
  Vector sizes = Vector::Zero(nc);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t id =
        data.cluster_ids.empty() ? static_cast<std::int64_t>(i)
                                 : data.cluster_ids[static_cast<std::size_t>(i)];
    const int c = index[id];
    sums.row(c) += X.row(i);
    sizes(c) += 1.0;
  }

  Matrix means(reps, p);
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
    Rng rng(seed, r);
    Vector total = Vector::Zero(p);
    double count = 0.0;
    for (int k = 0; k < nc; ++k) {
      const auto c = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(nc)));
      total += sums.row(c).transpose();
      count += sizes(c);
    }
    means.row(static_cast<Eigen::Index>(r)) = (total / count).transpose();
  });
  const Vector mbar = means.colwise().mean().transpose();
  const Matrix centered = means.rowwise() - mbar.transpose();
  Matrix omega = static_cast<double>(n) * (centered.transpose() * centered) /
                 static_cast<double>(reps - 1);
  return 0.5 * (omega + omega.transpose());
}

}  // namespace ineqgcc
