#include "ineqgcc/linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ineqgcc/error.hpp"

namespace ineqgcc {

namespace {

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& m) {
  return Eigen::BDCSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

int rank(const Matrix& m, RankTolerance tol) {
  require(all_finite(m), "rank: non-finite matrix entry");
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return 0;
  const double cut = tol.absolute + tol.relative * smax;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

Matrix pinv(const Matrix& m) {
  require(all_finite(m), "pinv: non-finite matrix entry");
  if (m.rows() == 0 || m.cols() == 0) return Matrix::Zero(m.cols(), m.rows());
  auto svd = thin_svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double cut = static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * smax;
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix sigma_tilde(const Matrix& omega, const Vector& delta, int d_mu) {
  require(d_mu >= 0, "sigma_tilde: negative d_mu");
  const Eigen::Index blocks = 1 + delta.size();
  const Eigen::Index side = d_mu * blocks;
  if (omega.rows() != side || omega.cols() != side) {
    fail(ErrorKind::InvalidInput,
         "sigma_tilde: omega must be square of side d_mu*(1+d_delta) = " +
             std::to_string(side));
  }
  require(all_finite(omega) && all_finite(delta),
          "sigma_tilde: non-finite input");
  // Weights of the block rows of S(delta): 1 for the identity block, then
  // delta_k for each delta_k * I block.
  Vector w(blocks);
  w(0) = 1.0;
  w.tail(delta.size()) = delta;
  Matrix out = Matrix::Zero(d_mu, d_mu);
  for (Eigen::Index a = 0; a < blocks; ++a) {
    if (w(a) == 0.0) continue;
    for (Eigen::Index b = 0; b < blocks; ++b) {
      if (w(b) == 0.0) continue;
      out.noalias() += (w(a) * w(b)) * omega.block(a * d_mu, b * d_mu, d_mu, d_mu);
    }
  }
  return 0.5 * (out + out.transpose());
}

Matrix select_rows(const Matrix& m, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

Vector select_rows(const Vector& v, std::span<const int> rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  }
  return out;
}

Matrix null_space(const Matrix& m, RankTolerance tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = tol.absolute + tol.relative * smax;
  Eigen::Index r = 0;
  if (smax > 0.0) {
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cut) ++r;
    }
  }
  return svd.matrixV().rightCols(n - r);
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() || a.cols() == 0 || b.cols() == 0,
          "hcat: row count mismatch");
  const Eigen::Index rows = a.cols() > 0 ? a.rows() : b.rows();
  Matrix out(rows, a.cols() + b.cols());
  if (a.cols() > 0) out.leftCols(a.cols()) = a;
  if (b.cols() > 0) out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace ineqgcc
