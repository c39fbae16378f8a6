#include "ineqgcc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>

#include "ineqgcc/error.hpp"
#include "ineqgcc/parallel.hpp"
#include "ineqgcc/rgcc.hpp"

namespace ineqgcc {

namespace {

constexpr int kMarketSize = 100;

ProblemSpec simple_spec(int J, int n) {
  ProblemSpec s;
  s.B = Matrix::Identity(J, J);
  s.D = Matrix::Zero(J, 1);
  s.d = Vector::Zero(J);
  s.n = n;
  return s;
}

Vector simple_slope(int J) {
  Vector v = Vector::Zero(J);
  v(0) = -1.0;
  v(1) = -1.0;
  return v;
}

Estimates simple_estimates(int J, double q, int n, Rng& rng) {
  const Vector mu = simple_mu(J, q, n);
  const Vector c = simple_c(J);
  const double sd = std::sqrt(2.0);
  MomentData data;
  data.d_delta = 1;
  data.g_obs.resize(n, J);
  data.G_obs.resize(n, J);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < J; ++j) data.g_obs(i, j) = mu(j) + rng.normal();
    for (int j = 0; j < J; ++j) data.G_obs(i, j) = c(j) + sd * rng.normal();
  }
  return estimates_from_observations(data);
}

IvSample iv_sample(int d_w, int n, Rng& rng) {
  require(d_w >= 1 && d_w <= 3, "interval IV: d_w must be 1, 2 or 3");
  require(n >= 2, "interval IV: n must be at least 2");
  const int dz = 1 << (d_w + 1);
  const int dm = 2 * dz;
  const int dd = 1 + d_w;
  IvSample s;
  s.d_w = d_w;
  s.d_delta = dd;
  s.g0 = Matrix::Zero(n, dm);
  s.g1 = Matrix::Zero(n, dm);
  s.G = Matrix::Zero(n, dm * dd);
  s.y_lower.resize(n);
  s.y_upper.resize(n);
  std::vector<double> reg(static_cast<std::size_t>(dd));
  for (int i = 0; i < n; ++i) {
    const double x2 = rng.bernoulli(0.5) ? 1.0 : 0.0;
    int cell = static_cast<int>(x2);
    reg[1] = 1.0;  // constant control
    for (int k = 1; k < d_w; ++k) {
      const bool w = rng.bernoulli(0.5);
      reg[static_cast<std::size_t>(k + 1)] = w ? 1.0 : 0.0;
      if (w) cell += 1 << k;
    }
    const bool ze = rng.bernoulli(0.5);
    if (ze) cell += 1 << d_w;
    const double eps = std::clamp(rng.normal(), -4.0, 4.0);
    const double x1 = (ze ? 1.0 : 0.0) + eps / 2.0 > 0.0 ? 1.0 : 0.0;
    reg[0] = x1;
    const double s_star = 1.0 / (1.0 + std::exp(x1 + x2 - eps));
    int count = 0;
    for (int k = 0; k < kMarketSize; ++k) count += rng.bernoulli(s_star) ? 1 : 0;
    const double sn = static_cast<double>(count) / kMarketSize;
    const double wide = 2.0 / kMarketSize;
    const double yu = std::log(sn + wide) - std::log(1.0 - sn + 0.00125);
    const double yl = std::log(sn + 0.00125) - std::log(1.0 - sn + wide);
    s.y_lower(i) = yl;
    s.y_upper(i) = yu;
    // Z (Y^L - X'beta) <= 0 and Z (X'beta - Y^U) <= 0, written as
    // -(g + G delta) <= 0 with theta2 moved into g.
    s.g0(i, cell) = -yl;
    s.g1(i, cell) = x2;
    s.g0(i, dz + cell) = yu;
    s.g1(i, dz + cell) = -x2;
    for (int k = 0; k < dd; ++k) {
      s.G(i, k * dm + cell) = reg[static_cast<std::size_t>(k)];
      s.G(i, k * dm + dz + cell) = -reg[static_cast<std::size_t>(k)];
    }
  }
  return s;
}

struct IvMoments {
  int n = 0;
  int dm = 0;
  int dd = 0;
  Vector mean;  // (g0, g1, vec G)
  Matrix cov;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

Vector simple_mu(int J, double q, int n) {
  Vector mu = Vector::Constant(J, 1.0 - q / std::sqrt(static_cast<double>(n)));
  mu(0) = -1.0;
  mu(1) = 1.0;
  return mu;
}

Vector simple_c(int J) {
  Vector c = Vector::Constant(J, -1.0);
  c(0) = 1.0;
  return c;
}

std::vector<double> linspace(double lo, double hi, int points) {
  require(points >= 1, "linspace: need at least one point");
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == points - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  }
  return out;
}

std::pair<ProblemSpec, Estimates> simple_dgp(int J, double q, int n,
                                             double theta, std::uint64_t seed) {
  Scenario sc;
  sc.model = ModelKind::Simple;
  sc.J = J;
  sc.q = q;
  sc.n = n;
  return scenario_family(sc, seed, 0).at(theta);
}

IvSample interval_iv_dgp(int d_w, int n, std::uint64_t seed) {
  Rng rng(seed, 0);
  return iv_sample(d_w, n, rng);
}

ProblemFamily iv_family(const IvSample& sample) {
  const int n = static_cast<int>(sample.g0.rows());
  const int dm = static_cast<int>(sample.g0.cols());
  const int dd = sample.d_delta;
  auto mom = std::make_shared<IvMoments>();
  mom->n = n;
  mom->dm = dm;
  mom->dd = dd;
  Matrix X(n, 2 * dm + dm * dd);
  X << sample.g0, sample.g1, sample.G;
  mom->mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - mom->mean.transpose();
  mom->cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  ProblemFamily f;
  f.base.B = -Matrix::Identity(dm, dm);
  f.base.D = Matrix::Zero(dm, dd);
  f.base.d = Vector::Zero(dm);
  f.base.n = n;
  const ProblemSpec base = f.base;
  f.evaluator = [mom, base](double theta) {
    const int dm = mom->dm;
    const int dd = mom->dd;
    const int pg = dm * dd;
    Estimates e;
    e.mu_bar = mom->mean.head(dm) + theta * mom->mean.segment(dm, dm);
    e.pi_bar.resize(dm, dd);
    for (int k = 0; k < dd; ++k) e.pi_bar.col(k) = mom->mean.segment(2 * dm + k * dm, dm);
    const Matrix& S = mom->cov;
    Matrix om(dm + pg, dm + pg);
    om.topLeftCorner(dm, dm) = S.block(0, 0, dm, dm) +
                               theta * (S.block(0, dm, dm, dm) + S.block(dm, 0, dm, dm)) +
                               theta * theta * S.block(dm, dm, dm, dm);
    om.topRightCorner(dm, pg) = S.block(0, 2 * dm, dm, pg) + theta * S.block(dm, 2 * dm, dm, pg);
    om.bottomLeftCorner(pg, dm) = om.topRightCorner(dm, pg).transpose();
    om.bottomRightCorner(pg, pg) = S.block(2 * dm, 2 * dm, pg, pg);
    e.omega_bar = 0.5 * (om + om.transpose());
    return std::make_pair(base, std::move(e));
  };
  return f;
}

ProblemFamily scenario_family(const Scenario& sc, std::uint64_t seed,
                              std::uint64_t rep) {
  Rng rng(seed, rep);
  if (sc.model == ModelKind::Simple) {
    require(sc.J >= 3, "simple model: J must be at least 3");
    require(sc.n >= 2, "simple model: n must be at least 2");
    ProblemFamily f;
    f.base = simple_spec(sc.J, sc.n);
    f.est = simple_estimates(sc.J, sc.q, sc.n, rng);
    f.d_slope = simple_slope(sc.J);
    return f;
  }
  return iv_family(iv_sample(sc.d_w, sc.n, rng));
}

std::vector<SimRow> run_power_curve(const Scenario& sc,
                                    const std::vector<double>& grid, int reps,
                                    const SimOptions& opt) {
  require(reps >= 1, "simulation: reps must be at least 1");
  require(!grid.empty(), "simulation: theta grid is empty");
  require(!opt.variants.empty(), "simulation: no variant requested");
  const bool want_rgcc = std::find(opt.variants.begin(), opt.variants.end(),
                                   Variant::Rgcc) != opt.variants.end();
  const std::size_t nt = grid.size();
  const std::size_t cells = static_cast<std::size_t>(reps) * nt;
  std::vector<char> rej_g(cells, 0), rej_r(cells, 0);
  std::vector<double> ms_g(opt.timing ? cells : 0), ms_r(opt.timing ? cells : 0);
  std::mutex observer_mu;

  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  parallel_for(static_cast<std::size_t>(reps), opt.threads, [&](std::size_t r) {
    const ProblemFamily family = scenario_family(sc, opt.base_seed, r);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto [spec, est] = family.at(grid[t]);
      const auto t0 = Clock::now();
      const TestResult g = gcc_test(spec, est, opt.alpha, opt.test);
      const auto t1 = Clock::now();
      TestResult rg;
      if (want_rgcc) rg = rgcc_refine(spec, est, g, opt.test);
      const auto t2 = Clock::now();
      const std::size_t cell = r * nt + t;
      rej_g[cell] = g.reject ? 1 : 0;
      rej_r[cell] = want_rgcc && rg.reject ? 1 : 0;
      if (opt.timing) {
        ms_g[cell] = ms_since(t0, t1);
        ms_r[cell] = ms_since(t0, t2);
      }
      if (opt.observer) {
        std::lock_guard<std::mutex> lock(observer_mu);
        opt.observer(Observation{r, t, grid[t], &g, want_rgcc ? &rg : nullptr});
      }
    }
  });

  std::vector<SimRow> rows;
  for (Variant v : opt.variants) {
    const auto& rej = v == Variant::Gcc ? rej_g : rej_r;
    const auto& ms = v == Variant::Gcc ? ms_g : ms_r;
    for (std::size_t t = 0; t < nt; ++t) {
      SimRow row;
      row.scenario = sc.label;
      row.variant = v;
      row.theta = grid[t];
      row.reps = reps;
      int count = 0;
      std::vector<double> times;
      for (std::size_t r = 0; r < static_cast<std::size_t>(reps); ++r) {
        count += rej[r * nt + t];
        if (opt.timing) times.push_back(ms[r * nt + t]);
      }
      row.reject_rate = static_cast<double>(count) / reps;
      if (opt.timing) row.median_ms = median(std::move(times));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SimRow> run_rejection_table(const Scenario& sc, double theta,
                                        int reps, const SimOptions& opt) {
  return run_power_curve(sc, {theta}, reps, opt);
}

std::string to_csv(const std::vector<SimRow>& rows) {
  std::string out = "scenario,variant,theta,reps,reject_rate,median_ms\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%d,%.6f,", to_string(r.variant),
                  r.theta, r.reps, r.reject_rate);
    out += r.scenario;
    out += ',';
    out += buf;
    if (r.median_ms) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.median_ms);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace ineqgcc
