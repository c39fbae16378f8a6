#include <benchmark/benchmark.h>

#include <random>

#include "ineqgcc/ci.hpp"
#include "ineqgcc/gcc.hpp"
#include "ineqgcc/polytope.hpp"
#include "ineqgcc/qp.hpp"
#include "ineqgcc/rgcc.hpp"
#include "ineqgcc/sim.hpp"

using namespace ineqgcc;

namespace {

Matrix gaussian(std::mt19937_64& g, int r, int c) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i < r; ++i) m(i, j) = n(g);
  }
  return m;
}

void BM_GccSimple(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const auto [spec, est] = simple_dgp(J, 0.0, 500, 0.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(gcc_test(spec, est, 0.05));
}
BENCHMARK(BM_GccSimple)->Arg(3)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_RgccSimple(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const auto [spec, est] = simple_dgp(J, 0.0, 500, 0.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(rgcc_test(spec, est, 0.05));
}
BENCHMARK(BM_RgccSimple)->Arg(3)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_GccIntervalIv(benchmark::State& state) {
  const ProblemFamily f = iv_family(interval_iv_dgp(static_cast<int>(state.range(0)), 500, 7));
  const auto [spec, est] = f.at(-1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gcc_test(spec, est, 0.05));
}
BENCHMARK(BM_GccIntervalIv)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_RestrictedQp(benchmark::State& state) {
  const int dc = static_cast<int>(state.range(0));
  std::mt19937_64 g(11);
  QpProblem p;
  const Matrix a = gaussian(g, 4, 4);
  p.weight = a * a.transpose() + Matrix::Identity(4, 4);
  p.center = gaussian(g, 4, 1).col(0);
  p.B = gaussian(g, dc, 4);
  p.C = gaussian(g, dc, 2);
  p.d = gaussian(g, dc, 1).col(0).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(solve_restricted_qp(p));
}
BENCHMARK(BM_RestrictedQp)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_VertexEnumeration(benchmark::State& state) {
  const int dc = static_cast<int>(state.range(0));
  std::mt19937_64 g(13);
  const Matrix C = gaussian(g, dc, 2);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_vertices(C));
  state.counters["supports"] = static_cast<double>(support_count(C));
}
BENCHMARK(BM_VertexEnumeration)->Arg(6)->Arg(12)->Arg(24)->Unit(benchmark::kMicrosecond);

void BM_CiInversion(benchmark::State& state) {
  const ProblemFamily f =
      scenario_family(Scenario{"bench", ModelKind::Simple, 10, 0.0, 500, 1}, 5, 0);
  CiOptions opt;
  opt.grid_points = static_cast<int>(state.range(0));
  opt.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_test(f, 0.05, -0.5, 0.5, Variant::Gcc, opt));
  }
}
BENCHMARK(BM_CiInversion)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
