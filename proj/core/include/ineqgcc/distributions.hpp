#pragma once

namespace ineqgcc {

/// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// P(chi2_dof <= x). dof = 0 is the point mass at zero.
double chi2_cdf(int dof, double x);

/// x with P(chi2_dof <= x) = p, for 0 <= p < 1. Returns 0 for dof = 0.
double chi2_quantile(int dof, double p);

/// Critical value cv(dof, alpha): the 1 - alpha quantile of chi2_dof.
double cv(int dof, double alpha);

/// Standard normal CDF; accepts +-infinity, rejects NaN.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS241, ~1e-16 relative accuracy).
/// Used by the simulation RNG for inverse-CDF normal draws.
double normal_quantile(double p);

}  // namespace ineqgcc
