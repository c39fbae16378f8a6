#include "ineqgcc/ci.hpp"

#include <cmath>

#include "ineqgcc/error.hpp"
#include "ineqgcc/parallel.hpp"
#include "ineqgcc/rgcc.hpp"

namespace ineqgcc {

const char* to_string(Variant v) noexcept {
  return v == Variant::Gcc ? "gcc" : "rgcc";
}

TestResult run_test(Variant v, const ProblemSpec& spec, const Estimates& est,
                    double alpha, const TestOptions& opt) {
  return v == Variant::Gcc ? gcc_test(spec, est, alpha, opt)
                           : rgcc_test(spec, est, alpha, opt);
}

std::pair<ProblemSpec, Estimates> ProblemFamily::at(double theta) const {
  if (evaluator) return evaluator(theta);
  ProblemSpec s = base;
  Estimates e = est;
  if (d_slope.size() > 0) {
    require(d_slope.size() == s.d.size(), "family: d_slope must have length d_C");
    s.d += theta * d_slope;
  }
  if (mu_slope.size() > 0) {
    require(mu_slope.size() == e.mu_bar.size(),
            "family: mu_slope must have length d_mu");
    e.mu_bar += theta * mu_slope;
  }
  return {std::move(s), std::move(e)};
}

CiResult invert_test(const ProblemFamily& family, double alpha, double lo,
                     double hi, Variant variant, const CiOptions& opt) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "invert_test: bracket must satisfy lo < hi");
  require(opt.grid_points >= 2, "invert_test: grid needs at least two points");
  const double tol = opt.tol > 0.0 ? opt.tol : 1e-4 * (hi - lo);

  auto accepts = [&](double theta) {
    const auto [spec, est] = family.at(theta);
    return !run_test(variant, spec, est, alpha, opt.test).reject;
  };

  CiResult r;
  const int g = opt.grid_points;
  r.grid.resize(static_cast<std::size_t>(g));
  r.grid_accept.resize(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    r.grid[static_cast<std::size_t>(i)] =
        i == g - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (g - 1);
  }
  parallel_for(static_cast<std::size_t>(g), opt.threads, [&](std::size_t i) {
    r.grid_accept[i] = accepts(r.grid[i]) ? 1 : 0;
  });

  // Bisect between a rejected point `out` and an accepted point `in`;
  // returns the final accepted point.
  auto bisect = [&](double out, double in) {
    while (std::abs(in - out) > tol) {
      const double mid = 0.5 * (in + out);
      (accepts(mid) ? in : out) = mid;
    }
    return in;
  };

  for (int i = 0; i < g;) {
    if (!r.grid_accept[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < g && r.grid_accept[static_cast<std::size_t>(j + 1)]) ++j;
    Segment s;
    s.lower = i == 0 ? lo
                     : bisect(r.grid[static_cast<std::size_t>(i - 1)],
                              r.grid[static_cast<std::size_t>(i)]);
    s.upper = j == g - 1 ? hi
                         : bisect(r.grid[static_cast<std::size_t>(j + 1)],
                                  r.grid[static_cast<std::size_t>(j)]);
    r.segments.push_back(s);
    i = j + 1;
  }

  if (r.segments.empty()) {
    r.empty = true;
    return r;
  }
  r.lower = r.segments.front().lower;
  r.upper = r.segments.back().upper;
  r.lower_at_bound = r.grid_accept.front() != 0;
  r.upper_at_bound = r.grid_accept.back() != 0;
  r.multi_segment = r.segments.size() > 1;
  return r;
}

}  // namespace ineqgcc
