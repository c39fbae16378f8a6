#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ineqgcc/distributions.hpp"
#include "ineqgcc/error.hpp"
#include "ineqgcc/models.hpp"
#include "ineqgcc/rng.hpp"
#include "support.hpp"

using namespace ineqgcc;

TEST_CASE("moment-inequality specs") {
  SUBCASE("one equality") {
    const ProblemSpec s = build_spec_test(1, 0);
    Matrix want(2, 1);
    want << -1, 1;
    CHECK(s.B == want);
    CHECK(s.D.cols() == 0);
    CHECK(s.eq_indices == IndexSet{0, 1});
  }
  SUBCASE("inequalities only") {
    const ProblemSpec s = build_spec_test(0, 3);
    CHECK(s.B == Matrix(-Matrix::Identity(3, 3)));
    CHECK(s.eq_indices.empty());
    CHECK(s.d == Vector::Zero(3));
  }
  SUBCASE("mixed") {
    const ProblemSpec s = build_spec_test(2, 2, 40);
    CHECK(s.B.rows() == 6);
    CHECK(s.B.cols() == 4);
    CHECK(rank(s.B) == 4);
    CHECK(s.n == 40);
  }
  SUBCASE("subvector keeps B and adds a zero D") {
    const ProblemSpec s = build_subvector(1, 2, 3);
    CHECK(s.B == build_spec_test(1, 2).B);
    CHECK(s.D == Matrix::Zero(4, 3));
  }
  CHECK_THROWS_AS(build_spec_test(0, 0), Error);
}

TEST_CASE("LP bounds translation") {
  LpModel m;
  m.gamma = Vector::Ones(2);
  m.Gamma = Matrix::Identity(1, 2);
  m.m = Vector::Constant(1, 0.3);
  m.A = -Matrix::Identity(2, 2);
  m.b = Vector::Zero(2);
  m.theta = 0.7;

  SUBCASE("known gamma") {
    const LpTranslation t = build_lp_bounds(m, 50);
    Matrix wantB(6, 1);
    wantB << 0, 0, 1, -1, 0, 0;
    CHECK(t.spec.B == wantB);
    CHECK(t.spec.D.row(0) == m.gamma.transpose());
    CHECK(t.spec.D.row(1) == -m.gamma.transpose());
    CHECK(t.spec.D.bottomRows(2) == m.A);
    CHECK(t.spec.d(0) == 0.7);
    CHECK(t.spec.d(1) == -0.7);
    CHECK(t.spec.eq_indices == IndexSet{0, 1, 2, 3});
    CHECK(t.mu_bar(0) == doctest::Approx(-0.3));
    CHECK(t.pi_bar == m.Gamma);
    CHECK(t.spec.n == 50);
  }
  SUBCASE("unknown gamma") {
    m.gamma_known = false;
    const LpTranslation t = build_lp_bounds(m);
    CHECK(t.spec.B.cols() == 2);
    const Vector first = t.spec.B.col(0);
    Vector want = Vector::Zero(6);
    want(0) = 1;
    want(1) = -1;
    CHECK(first == want);
    CHECK(t.pi_bar.row(0) == m.gamma.transpose());
    CHECK(t.spec.D.topRows(2).isZero());
  }
  SUBCASE("feasibility matches the LP") {
    // theta = delta_1 + delta_2 with delta_1 = m and delta >= 0: any
    // theta >= m is attainable, smaller theta is not.
    auto feasible = [&](double theta) {
      LpModel mm = m;
      mm.theta = theta;
      const LpTranslation t = build_lp_bounds(mm);
      const Estimates e = t.estimates(Matrix::Identity(3, 3) * 1e-6);
      const Matrix cbar = c_bar(t.spec, e);
      const Vector rhs = t.spec.d - t.spec.B * e.mu_bar;
      const ProjectedRep rep = project_polyhedron(Matrix::Zero(6, 1), cbar, rhs);
      return (rep.g.array() >= -1e-12).all();
    };
    CHECK(feasible(0.3));
    CHECK(feasible(2.0));
    CHECK_FALSE(feasible(0.2));
  }
  SUBCASE("covariance transform") {
    const LpTranslation t = build_lp_bounds(m);
    // source = (m, vec Gamma) has 1 + 2 entries; target = (mu, vec Pi).
    CHECK(t.transform.rows() == 3);
    CHECK(t.transform.cols() == 3);
    Matrix src = Matrix::Identity(3, 3);
    src(0, 1) = src(1, 0) = 0.25;
    const Estimates e = t.estimates(src);
    CHECK(e.omega_bar(0, 0) == doctest::Approx(1.0));
    CHECK(e.omega_bar(0, 1) == doctest::Approx(-0.25));
    m.gamma_known = false;
    const LpTranslation u = build_lp_bounds(m);
    CHECK(u.transform.cols() == 5);
    CHECK(u.transform.rows() == 6);
  }
}

TEST_CASE("null-space reparameterization") {
  std::mt19937_64 g(8);
  for (int it = 0; it < 20; ++it) {
    const int dt = 1 + static_cast<int>(g() % 3);
    const int db = dt + 1 + static_cast<int>(g() % 3);
    const Matrix L = testing::random_matrix(g, dt, db);
    const Matrix Lc = reparameterize_null(L);
    CHECK(Lc.rows() == db - dt);
    CHECK((Lc * L.transpose()).norm() < 1e-10);
    CHECK((Lc * Lc.transpose() - Matrix::Identity(db - dt, db - dt)).norm() < 1e-10);
    Matrix full(db, db);
    full << L, Lc;
    CHECK(rank(full) == db);
  }
  Matrix deficient(2, 3);
  deficient << 1, 2, 3, 2, 4, 6;
  CHECK_THROWS_AS(reparameterize_null(deficient), Error);
  CHECK_THROWS_AS(reparameterize_null(Matrix::Identity(2, 2)), Error);
}

TEST_CASE("estimates from observations") {
  MomentData d;
  d.g_obs.resize(2, 1);
  d.g_obs << 0, 2;
  const Estimates e = estimates_from_observations(d);
  CHECK(e.mu_bar(0) == doctest::Approx(1.0));
  CHECK(e.omega_bar(0, 0) == doctest::Approx(2.0));
  CHECK(e.pi_bar.cols() == 0);

  MomentData j;
  j.d_delta = 2;
  j.g_obs = Matrix::Zero(3, 2);
  j.G_obs.resize(3, 4);
  j.G_obs << 1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4;
  const Estimates f = estimates_from_observations(j);
  Matrix pi(2, 2);
  pi << 1, 3, 2, 4;  // vec is column-major
  CHECK(f.pi_bar == pi);
  CHECK(f.omega_bar.rows() == 6);

  MomentData bad = j;
  bad.G_obs.resize(3, 3);
  CHECK_THROWS_AS(estimates_from_observations(bad), Error);
}

TEST_CASE("bootstrap covariance") {
  const int n = 2000;
  Rng rng(99, 0);
  MomentData d;
  d.g_obs.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    d.g_obs(i, 0) = rng.normal();
    d.g_obs(i, 1) = rng.normal();
  }
  const Matrix om = bootstrap_omega(d, 1000, 5);
  CHECK(std::abs(om(0, 0) - 1.0) < 0.15);
  CHECK(std::abs(om(1, 1) - 1.0) < 0.15);
  CHECK(std::abs(om(0, 1)) < 0.15);
  CHECK(bootstrap_omega(d, 1000, 5) == om);
  CHECK(bootstrap_omega(d, 1000, 5, 3) == om);
  CHECK(bootstrap_omega(d, 1000, 6) != om);

  SUBCASE("clusters of identical rows inflate the variance") {
    MomentData c;
    c.g_obs.resize(n, 1);
    c.cluster_ids.resize(n);
    for (int i = 0; i < n; ++i) {
      c.g_obs(i, 0) = d.g_obs(i / 4, 0);
      c.cluster_ids[static_cast<std::size_t>(i)] = i / 4;
    }
    const Vector x = d.g_obs.col(0).head(n / 4);
    const double var = (x.array() - x.mean()).square().sum() / (n / 4);
    const double v = bootstrap_omega(c, 1000, 5)(0, 0);
    CHECK(std::abs(v / (4.0 * var) - 1.0) < 0.15);
  }
}

TEST_CASE("equality-only statistic follows its chi-square limit") {
  const int reps = 5000;
  const int n = 200;
  const ProblemSpec s = build_spec_test(3, 0, n);
  std::vector<double> stats;
  for (int r = 0; r < reps; ++r) {
    Rng rng(2024, static_cast<std::uint64_t>(r));
    MomentData d;
    d.g_obs.resize(n, 3);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) d.g_obs(i, k) = rng.normal();
    const TestResult t = gcc_test(s, estimates_from_observations(d), 0.05);
    CHECK(t.dof_s == 3);
    stats.push_back(t.statistic);
  }
  std::sort(stats.begin(), stats.end());
  const double q95 = stats[static_cast<std::size_t>(0.95 * reps)];
  CHECK(std::abs(q95 - chi2_quantile(3, 0.95)) < 0.5);
}
