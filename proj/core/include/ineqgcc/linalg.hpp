#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ineqgcc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free list of 0-based row indices.
using IndexSet = std::vector<int>;

/// Singular values above `absolute + relative * sigma_max` count toward rank.
struct RankTolerance {
  double relative = 1e-10;
  double absolute = 0.0;
};

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

/// Numerical rank by SVD. Empty and all-zero matrices have rank 0.
int rank(const Matrix& m, RankTolerance tol = {});

/// Moore-Penrose pseudoinverse. Singular values at or below
/// `max(rows, cols) * eps * sigma_max` are treated as zero.
Matrix pinv(const Matrix& m);

/// S(delta)' * omega * S(delta) with S(delta) = [I; delta (x) I], i.e. the
/// covariance of mu_bar + Pi_bar * delta when omega is the covariance of
/// (mu_bar', vec(Pi_bar)')' with vec stacking columns.
Matrix sigma_tilde(const Matrix& omega, const Vector& delta, int d_mu);

/// Rows of `m` picked by `rows`, in the given order.
Matrix select_rows(const Matrix& m, std::span<const int> rows);
Vector select_rows(const Vector& v, std::span<const int> rows);

/// Orthonormal basis (as columns) of the null space of `m`.
Matrix null_space(const Matrix& m, RankTolerance tol = {});

/// Horizontal concatenation [a, b]; either side may have zero columns.
Matrix hcat(const Matrix& a, const Matrix& b);

}  // namespace ineqgcc
