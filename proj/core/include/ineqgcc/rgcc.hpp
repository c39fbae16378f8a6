#pragma once

#include "ineqgcc/gcc.hpp"
#include "ineqgcc/polytope.hpp"

namespace ineqgcc {

/// Inactivity of projected row j relative to reference row `ref`:
/// sqrt(n) |a_ref|_S (g_j - a_j' mu) / (|a_ref|_S |a_j|_S - a_ref' S a_j),
/// +infinity when the denominator is not positive. |a|_S = sqrt(a' S a).
double tau_inactivity(const ProjectedRep& rep, const Matrix& sigma,
                      const Vector& mu_hat, int n, int ref_row, int j);

/// First active row of A with nonzero norm, or -1.
int default_reference_row(const ProjectedRep& rep, const IndexSet& active_rows);

/// Refined level 2 alpha Phi(min_j tau_j) when r_hat = 1, alpha otherwise.
/// `ref_row` = -1 selects default_reference_row.
double refined_level(const ProjectedRep& rep, const Matrix& sigma,
                     const Vector& mu_hat, int n, int r_hat, double alpha,
                     const IndexSet& active_rows, int ref_row = -1);

/// Applies the refinement to an existing GCC result for the same inputs.
TestResult rgcc_refine(const ProblemSpec& spec, const Estimates& est,
                       const TestResult& gcc, const TestOptions& opt = {});

TestResult rgcc_test(const ProblemSpec& spec, const Estimates& est,
                     double alpha, const TestOptions& opt = {});

}  // namespace ineqgcc
