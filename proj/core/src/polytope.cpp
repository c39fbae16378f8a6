#include "ineqgcc/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ineqgcc/error.hpp"

namespace ineqgcc {

namespace {

constexpr double kNonnegTol = 1e-10;
constexpr double kDedupTol = 1e-8;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::uint64_t{1} << 62)) return r;
  }
  return r;
}

// M = [C'; 1'], the equality system M h = e_last.
Matrix vertex_system(const Matrix& C) {
  Matrix M(C.cols() + 1, C.rows());
  M.topRows(C.cols()) = C.transpose();
  M.row(C.cols()).setOnes();
  return M;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i) - b(i)) > kDedupTol) return a(i) < b(i);
  }
  return false;
}

bool same(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() <= kDedupTol;
}

}  // namespace

std::uint64_t support_count(const Matrix& C) {
  const std::uint64_t dc = static_cast<std::uint64_t>(C.rows());
  const int r = rank(vertex_system(C));
  std::uint64_t total = 0;
  for (int k = 1; k <= r; ++k) total += binomial(dc, static_cast<std::uint64_t>(k));
  return total;
}

Matrix enumerate_vertices(const Matrix& C, VertexGuard guard) {
  require(all_finite(C), "enumerate_vertices: non-finite entry");
  const int dc = static_cast<int>(C.rows());
  if (dc == 0) return Matrix(0, 0);
  if (C.cols() > guard.max_delta) {
    std::ostringstream msg;
    msg << "enumerate_vertices: d_delta = " << C.cols() << " exceeds guard "
        << guard.max_delta;
    fail(ErrorKind::InvalidInput, msg.str());
  }
  const std::uint64_t count = support_count(C);
  if (count > guard.max_supports) {
    std::ostringstream msg;
    msg << "enumerate_vertices: " << count << " candidate supports exceed guard "
        << guard.max_supports;
    fail(ErrorKind::InvalidInput, msg.str());
  }

  const Matrix M = vertex_system(C);
  const int r = rank(M);
  Vector e = Vector::Zero(M.rows());
  e(M.rows() - 1) = 1.0;

  std::vector<Vector> found;
  std::vector<int> S;
  // Lexicographic walk over all supports of size 1..r.
  for (int k = 1; k <= r; ++k) {
    S.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) S[static_cast<std::size_t>(i)] = i;
    while (true) {
      Matrix MS(M.rows(), k);
      for (int i = 0; i < k; ++i) MS.col(i) = M.col(S[static_cast<std::size_t>(i)]);
      Eigen::ColPivHouseholderQR<Matrix> qr(MS);
      qr.setThreshold(1e-10);
      if (qr.rank() == k) {
        const Vector hs = qr.solve(e);
        const bool consistent = (MS * hs - e).cwiseAbs().maxCoeff() <= 1e-9;
        if (consistent && hs.minCoeff() >= -kNonnegTol) {
          Vector h = Vector::Zero(dc);
          for (int i = 0; i < k; ++i) {
            h(S[static_cast<std::size_t>(i)]) = std::max(hs(i), 0.0);
          }
          found.push_back(std::move(h));
        }
      }
      int pos = k - 1;
      while (pos >= 0 && S[static_cast<std::size_t>(pos)] == dc - k + pos) --pos;
      if (pos < 0) break;
      ++S[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < k; ++i) {
        S[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i - 1)] + 1;
      }
    }
  }

  std::sort(found.begin(), found.end(), lex_less);
  std::vector<Vector> unique;
  for (auto& h : found) {
    if (unique.empty() || !same(unique.back(), h)) unique.push_back(std::move(h));
  }
  Matrix H(static_cast<Eigen::Index>(unique.size()), dc);
  for (std::size_t i = 0; i < unique.size(); ++i) {
    H.row(static_cast<Eigen::Index>(i)) = unique[i].transpose();
  }
  return H;
}

ProjectedRep project_polyhedron(const Matrix& B, const Matrix& C,
                                const Vector& d, VertexGuard guard) {
  require(B.rows() == d.size() && C.rows() == d.size(),
          "project_polyhedron: row counts of B, C, d differ");
  ProjectedRep rep;
  rep.H = enumerate_vertices(C, guard);
  if (rep.H.rows() == 0) {
    rep.H.resize(0, d.size());
    rep.A.resize(0, B.cols());
    rep.g.resize(0);
    return rep;
  }
  rep.A = rep.H * B;
  rep.g = rep.H * d;
  return rep;
}

}  // namespace ineqgcc
