#pragma once

#include <random>

#include "ineqgcc/linalg.hpp"
#include "ineqgcc/qp.hpp"

namespace testing {

using ineqgcc::Matrix;
using ineqgcc::Vector;

inline Matrix random_matrix(std::mt19937_64& g, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(g);
  return m;
}

inline Vector random_vector(std::mt19937_64& g, int k, double scale = 1.0) {
  return random_matrix(g, k, 1, scale).col(0);
}

/// Random SPD matrix with eigenvalues in roughly [0.5, 2.5].
inline Matrix random_spd(std::mt19937_64& g, int k) {
  const Matrix q = random_matrix(g, k, k).householderQr().householderQ();
  std::uniform_real_distribution<double> u(0.5, 2.5);
  Vector ev(k);
  for (int i = 0; i < k; ++i) ev(i) = u(g);
  Matrix w = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (w + w.transpose());
}

/// Feasible by construction: d = B mu* + C delta* + |noise|, with some rows
/// made tight and some duplicated or zeroed to exercise degeneracy.
inline ineqgcc::QpProblem random_qp(std::mt19937_64& g, int dm, int dd, int dc) {
  ineqgcc::QpProblem p;
  p.weight = random_spd(g, dm);
  p.center = random_vector(g, dm, 2.0);
  p.B = random_matrix(g, dc, dm);
  p.C = random_matrix(g, dc, dd);
  const Vector mu = random_vector(g, dm);
  const Vector delta = random_vector(g, dd);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector slack(dc);
  for (int j = 0; j < dc; ++j) slack(j) = u(g) < 0.3 ? 0.0 : u(g);
  p.d = p.B * mu + (dd > 0 ? Vector(p.C * delta) : Vector::Zero(dc)) + slack;
  return p;
}

}  // namespace testing
