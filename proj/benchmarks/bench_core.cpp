#include <benchmark/benchmark.h>

#include <random>

#include "gri/em.hpp"
#include "gri/grid.hpp"
#include "gri/patchwise.hpp"
#include "gri/solver.hpp"

using namespace gri;

namespace {

CMat random_cmat(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> d(0.0, 1.0);
  CMat m(rows, cols);
  for (long j = 0; j < cols; ++j)
    for (long i = 0; i < rows; ++i) m(i, j) = cplx(d(rng), d(rng));
  return m;
}

CVec random_cvec(std::mt19937_64& rng, long n) {
  std::normal_distribution<double> d(0.0, 1.0);
  CVec v(n);
  for (long i = 0; i < n; ++i) v[i] = cplx(d(rng), d(rng));
  return v;
}

void BM_DyadicGreen(benchmark::State& state) {
  const Wavenumber k = Wavenumber::from_frequency(2.0e9);
  const Vec3 src(0.0, 0.0, 0.0);
  Vec3 r(0.3, -0.7, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dyadic_green(r, src, k));
    r[0] += 1e-9;  // defeat value caching
  }
}
BENCHMARK(BM_DyadicGreen);

void BM_AssembleMatrix(benchmark::State& state) {
  const int div = static_cast<int>(state.range(0));
  const ImagingGrid grid({0, -0.6, 0.5}, {1.0, 0.4, 0.5}, {div, div / 2, div / 2});
  std::vector<Vec3> rx;
  for (int i = 0; i < 24; ++i)
    rx.push_back({-0.5 + 0.05 * i, 0.0, 0.2});
  const Transmitter tx{{-0.55, 0.0, 0.0}, Vec3::UnitZ()};
  const Wavenumber k = Wavenumber::from_frequency(1.5e9);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        assemble_measurement_matrix(grid, rx, tx, k, Axis::Z,
                                    GreensMode::Dyadic, 1));
  state.SetItemsProcessed(state.iterations() * 24 * grid.voxel_count());
}
BENCHMARK(BM_AssembleMatrix)->Arg(8)->Arg(16);

void BM_ProxMixedNorm(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const CMat v = random_cmat(rng, state.range(0), 4);
  const InnerNorm p = static_cast<InnerNorm>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(prox_mixed_norm(v, 0.3, p));
  state.SetItemsProcessed(state.iterations() * v.rows());
}
BENCHMARK(BM_ProxMixedNorm)
    ->Args({4096, 0})
    ->Args({4096, 1})
    ->Args({4096, 2});

void BM_SolverIteration(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const long n = state.range(0);
  std::vector<GroupSystem> systems(4);
  for (auto& s : systems) {
    s.a = random_cmat(rng, n / 4, n);
    s.y = random_cvec(rng, n / 4);
  }
  SolverConfig cfg;
  cfg.max_iters = 10;
  cfg.tol = 1e-300;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_first_order(systems, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_SolverIteration)->Arg(256)->Arg(1024);

void BM_PsfBlock(benchmark::State& state) {
  std::mt19937_64 rng(13);
  const CMat a = random_cmat(rng, 192, 1600);
  std::vector<long> idx(state.range(0));
  for (long i = 0; i < state.range(0); ++i) idx[i] = i * 2;
  for (auto _ : state) benchmark::DoNotOptimize(psf_block(a, idx));
}
BENCHMARK(BM_PsfBlock)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
