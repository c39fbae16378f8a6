#pragma once

#include <cstdint>

#include "ineqgcc/linalg.hpp"

namespace ineqgcc {

/// Vertices H of {h >= 0 : h'C = 0, h'1 = 1} and the induced inequalities
/// A mu <= g (A = HB, g = Hd) describing the mu-projection of
/// {(mu, delta) : B mu + C delta <= d}.
struct ProjectedRep {
  Matrix H;
  Matrix A;
  Vector g;
};

struct VertexGuard {
  /// Upper bound on the number of candidate supports examined.
  std::uint64_t max_supports = 5'000'000;
  int max_delta = 10;
};

/// Number of candidate supports enumerate_vertices would examine for C.
std::uint64_t support_count(const Matrix& C);

/// All basic feasible solutions of {h >= 0 : h'C = 0, h'1 = 1}, one per
/// row, sorted lexicographically. Zero rows when the polytope is empty.
/// Throws Error(InvalidInput) when the support count exceeds the guard.
Matrix enumerate_vertices(const Matrix& C, VertexGuard guard = {});

ProjectedRep project_polyhedron(const Matrix& B, const Matrix& C,
                                const Vector& d, VertexGuard guard = {});

}  // namespace ineqgcc
