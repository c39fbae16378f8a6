#include "ineqgcc/distributions.hpp"

#include <cmath>
#include <limits>

#include "ineqgcc/error.hpp"

namespace ineqgcc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// glibc's std::lgamma writes the global signgam; the reentrant variant keeps
// the distribution kernels safe to call from simulation worker threads.
double log_gamma(double a) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(a, &sign);
#else
  return std::lgamma(a);
#endif
}

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

double chi2_pdf(int dof, double x) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * dof;
  return 0.5 * std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - log_gamma(a));
}

double chi2_upper(int dof, double x) { return gamma_q(0.5 * dof, 0.5 * x); }

double poly(const double* c, int n, double r) {
  double v = c[n - 1];
  for (int i = n - 2; i >= 0; --i) v = v * r + c[i];
  return v;
}

}  // namespace

double gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_p: requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_q: requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_cdf(int dof, double x) {
  require(dof >= 0, "chi2_cdf: negative degrees of freedom");
  if (std::isnan(x)) fail(ErrorKind::InvalidInput, "chi2_cdf: NaN argument");
  if (x < 0.0) return 0.0;
  if (dof == 0) return 1.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double p) {
  require(dof >= 0, "chi2_quantile: negative degrees of freedom");
  if (!(p >= 0.0 && p < 1.0)) {
    fail(ErrorKind::InvalidInput, "chi2_quantile: p must lie in [0, 1)");
  }
  if (dof == 0 || p == 0.0) return 0.0;

  const double k = dof;
  const bool upper = p > 0.5;
  const double q = 1.0 - p;
  // Residual on the better-conditioned tail; increasing in x either way.
  auto residual = [&](double x) {
    return upper ? q - chi2_upper(dof, x) : chi2_cdf(dof, x) - p;
  };

  // Wilson-Hilferty starting point, with the small-x series inversion as a
  // fallback when the cube goes nonpositive.
  const double z = normal_quantile(p);
  const double h = 2.0 / (9.0 * k);
  double x = k * std::pow(1.0 - h + z * std::sqrt(h), 3);
  if (!(x > 0.0)) {
    const double a = 0.5 * k;
    x = 2.0 * std::exp((std::log(p) + log_gamma(a + 1.0)) / a);
  }

  double lo = 0.0;
  double hi = std::max(2.0 * x, k + 10.0);
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }

  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double r = residual(x);
    if (r == 0.0) {
      converged = true;
      break;
    }
    if (r < 0.0) {
      lo = std::max(lo, x);
    } else {
      hi = std::min(hi, x);
    }
    const double dens = chi2_pdf(dof, x);
    double next = dens > 0.0 ? x - r / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-15 * std::max(1.0, x)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    for (int it = 0; it < 2000 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    x = 0.5 * (lo + hi);
  }
  return x;
}

double cv(int dof, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::InvalidInput, "cv: alpha must lie in (0, 1)");
  }
  return chi2_quantile(dof, 1.0 - alpha);
}

double normal_cdf(double x) {
  if (std::isnan(x)) fail(ErrorKind::InvalidInput, "normal_cdf: NaN argument");
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    fail(ErrorKind::InvalidInput, "normal_quantile: p must lie in [0, 1]");
  }
  static constexpr double a[8] = {
      3.387132872796366608,   133.14166789178437745, 1971.5909503065514427,
      13731.693765509461125,  45921.953931549871457, 67265.770927008700853,
      33430.575583588128105,  2509.0809287301226727};
  static constexpr double b[8] = {
      1.0,                    42.313330701600911252, 687.1870074920579083,
      5394.1960214247511077,  21213.794301586595867, 39307.89580009271061,
      28729.085735721942674,  5226.495278852545925};
  static constexpr double c[8] = {
      1.42343711074968357734,  4.6303378461565452959,
      5.7694972214606914055,   3.64784832476320460504,
      1.27045825245236838258,  0.24178072517745061177,
      0.0227238449892691845833, 7.7454501427834140764e-4};
  static constexpr double d[8] = {
      1.0,                     2.05319162663775882187,
      1.6763848301838038494,   0.68976733498510000455,
      0.14810397642748007459,  0.0151986665636164571966,
      5.475938084995344946e-4, 1.05075007164441684324e-9};
  static constexpr double e[8] = {
      6.6579046435011037772,    5.4637849111641143699,
      1.7848265399172913358,    0.29656057182850489123,
      0.026532189526576123093,  0.0012426609473880784386,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[8] = {
      1.0,                      0.59983220655588793769,
      0.13692988092273580531,   0.0148753612908506148525,
      7.868691311456132591e-4,  1.8463183175100546818e-5,
      1.4215117583164458887e-7, 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, 8, r) / poly(b, 8, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = poly(c, 8, r) / poly(d, 8, r);
  } else {
    r -= 5.0;
    val = poly(e, 8, r) / poly(f, 8, r);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace ineqgcc
