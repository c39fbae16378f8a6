#include "doctest.h"

#include <cmath>

#include "ineqgcc/error.hpp"
#include "ineqgcc/qp.hpp"
#include "support.hpp"

using namespace ineqgcc;

namespace {

QpProblem scalar_problem(double center, Matrix B, Matrix C, Vector d) {
  QpProblem p;
  p.weight = Matrix::Identity(1, 1);
  p.center = Vector::Constant(1, center);
  p.B = std::move(B);
  p.C = std::move(C);
  p.d = std::move(d);
  return p;
}

// B = (0, 1)', C = (1, 1)', d = 0: every mu is feasible (delta <= -mu, 0).
QpProblem degenerate_pair() {
  Matrix B(2, 1), C(2, 1);
  B << 0, 1;
  C << 1, 1;
  return scalar_problem(0.0, B, C, Vector::Zero(2));
}

}  // namespace

TEST_CASE("feasible center projects to itself") {
  std::mt19937_64 g(11);
  QpProblem p = testing::random_qp(g, 3, 1, 5);
  p.center = Vector::Random(3) * 0.1;
  // Make the center strictly feasible for delta = 0.
  p.d = p.B * p.center + Vector::Constant(5, 1.0);
  const QpSolution s = solve_restricted_qp(p);
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((s.mu_hat - p.center).norm() < 1e-9);
  CHECK(s.active_set.empty());
}

TEST_CASE("degenerate pair: delta pinned at zero, both rows active") {
  const QpProblem p = degenerate_pair();
  const QpSolution s = solve_restricted_qp(p);
  CHECK(std::abs(s.mu_hat(0)) < 1e-10);
  CHECK(std::abs(s.delta_hat(0)) < 1e-10);
  CHECK(s.objective < 1e-16);
  CHECK(s.active_set == IndexSet{0, 1});
}

TEST_CASE("one-sided scalar projection") {
  Matrix B(1, 1);
  B << 1;
  QpProblem p = scalar_problem(1.0, B, Matrix(1, 0), Vector::Zero(1));
  const QpSolution s = solve_restricted_qp(p);
  CHECK(s.mu_hat(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.psi_hat(0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.active_set == IndexSet{0});
}

TEST_CASE("infeasible constraint set is certified") {
  Matrix B(2, 1);
  B << 1, -1;
  Vector d(2);
  d << -1, -1;  // mu <= -1 and mu >= 1
  const QpProblem p = scalar_problem(0.0, B, Matrix(2, 0), d);
  try {
    solve_restricted_qp(p);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
  try {
    brute_force_qp(p);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("zero row with negative right-hand side is infeasible") {
  Matrix B(1, 1);
  B << 0;
  Vector d(1);
  d << -1;
  CHECK_THROWS_AS(solve_restricted_qp(scalar_problem(0.0, B, Matrix(1, 0), d)), Error);
}

TEST_CASE("unconstrained problem returns the center") {
  QpProblem p = scalar_problem(3.0, Matrix(0, 1), Matrix(0, 0), Vector(0));
  CHECK(solve_restricted_qp(p).mu_hat(0) == doctest::Approx(3.0));
  CHECK(brute_force_qp(p).mu_hat(0) == doctest::Approx(3.0));
}

TEST_CASE("min_norm_point") {
  Matrix C(1, 1);
  C << 1;
  CHECK(min_norm_point(C, Vector::Constant(1, -1.0))(0) == doctest::Approx(-1.0));
  CHECK(std::abs(min_norm_point(C, Vector::Constant(1, 2.0))(0)) < 1e-10);

  Matrix C2(2, 1);
  C2 << 1, -1;
  Vector b(2);
  b << 3, -2;  // 2 <= delta <= 3
  const double got = min_norm_point(C2, b)(0);
  double best = 1e300, arg = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = -5.0 + 10.0 * i / 100000.0;
    if (x <= 3.0 && -x <= -2.0 && std::abs(x) < best) {
      best = std::abs(x);
      arg = x;
    }
  }
  CHECK(got == doctest::Approx(arg).epsilon(1e-4));
  CHECK(got == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("min_norm_multipliers") {
  SUBCASE("interior optimum") {
    Matrix B(1, 1);
    B << 1;
    QpProblem p = scalar_problem(-1.0, B, Matrix(1, 0), Vector::Zero(1));
    const QpSolution s = solve_restricted_qp(p);
    CHECK(min_norm_multipliers(p, s, s.active_set).norm() == 0.0);
  }
  SUBCASE("single binding row") {
    Matrix B(1, 1);
    B << 1;
    QpProblem p = scalar_problem(1.0, B, Matrix(1, 0), Vector::Zero(1));
    const QpSolution s = solve_restricted_qp(p);
    CHECK(min_norm_multipliers(p, s, s.active_set)(0) == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("duplicated row splits equally") {
    Matrix B(2, 1);
    B << 1, 1;
    QpProblem p = scalar_problem(1.0, B, Matrix(2, 0), Vector::Zero(2));
    const QpSolution s = solve_restricted_qp(p);
    const Vector psi = min_norm_multipliers(p, s, {0, 1});
    CHECK(psi(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(psi(1) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("degenerate pair has zero multipliers") {
    const QpProblem p = degenerate_pair();
    const QpSolution s = solve_restricted_qp(p);
    CHECK(min_norm_multipliers(p, s, s.active_set).norm() < 1e-12);
  }
}

TEST_CASE("brute force guard") {
  std::mt19937_64 g(3);
  const QpProblem p = testing::random_qp(g, 5, 4, 6);
  CHECK_THROWS_AS(brute_force_qp(p), Error);
}

TEST_CASE("solver agrees with exhaustive oracle on random instances") {
  std::mt19937_64 g(20240501);
  std::uniform_int_distribution<int> dmu(1, 4), ddel(0, 2), dcon(1, 8);
  for (int it = 0; it < 300; ++it) {
    const int dm = dmu(g);
    const int dd = std::min(ddel(g), 6 - dm);
    const QpProblem p = testing::random_qp(g, dm, dd, dcon(g));
    const QpSolution s = solve_restricted_qp(p);
    const QpSolution o = brute_force_qp(p);
    CAPTURE(it);
    CHECK(std::abs(s.objective - o.objective) <= 1e-8 * (1.0 + o.objective));
    CHECK((s.mu_hat - o.mu_hat).norm() <= 1e-6 * (1.0 + o.mu_hat.norm()));
    CHECK(s.kkt_residual <= 1e-8 * (1.0 + p.center.lpNorm<Eigen::Infinity>()));
    CHECK(o.kkt_residual <= 1e-8 * (1.0 + p.center.lpNorm<Eigen::Infinity>()));
    // Complementary slackness.
    for (Eigen::Index j = 0; j < p.d.size(); ++j) {
      const double slack = p.d(j) - p.B.row(j).dot(s.mu_hat) -
                           (dd > 0 ? p.C.row(j).dot(s.delta_hat) : 0.0);
      CHECK(std::abs(s.psi_hat(j) * slack) <= 1e-7 * (1.0 + s.psi_hat.norm()));
    }
  }
}

TEST_CASE("objective is invariant to a linear change of mu coordinates") {
  std::mt19937_64 g(77);
  for (int it = 0; it < 50; ++it) {
    const QpProblem p = testing::random_qp(g, 3, 1, 6);
    const Matrix S = testing::random_spd(g, 3) +
                     0.3 * testing::random_matrix(g, 3, 3);  // well-conditioned
    const Matrix Sinv = S.inverse();
    QpProblem q = p;
    q.B = p.B * S;                          // mu = S nu
    q.weight = S.transpose() * p.weight * S;
    q.weight = 0.5 * (q.weight + q.weight.transpose());
    q.center = Sinv * p.center;
    const double a = solve_restricted_qp(p).objective;
    const double b = solve_restricted_qp(q).objective;
    CHECK(std::abs(a - b) <= 1e-8 * (1.0 + a));
  }
}

TEST_CASE("mu_hat does not depend on which optimal delta is returned") {
  std::mt19937_64 g(5);
  for (int it = 0; it < 50; ++it) {
    QpProblem p = testing::random_qp(g, 2, 2, 5);
    // Permuting the rows changes the solver's path through the problem.
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(p.d.size());
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + p.d.size(), g);
    QpProblem q = p;
    q.B = perm * p.B;
    q.C = perm * p.C;
    q.d = perm * p.d;
    const QpSolution a = solve_restricted_qp(p);
    const QpSolution b = solve_restricted_qp(q);
    CHECK((a.mu_hat - b.mu_hat).norm() <= 1e-7 * (1.0 + a.mu_hat.norm()));
  }
}
