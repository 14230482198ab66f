// SPDX-License-Identifier: MIT
//
// Informational micro-benchmarks for the hot paths: compression, rounding,
// the train least-squares solve, and the grid right-hand sides.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ttoi/lstsq.hpp"
#include "ttoi/opinf_rom.hpp"
#include "ttoi/pde_gen.hpp"
#include "ttoi/tt_tensor.hpp"

namespace {

using namespace ttoi;

TtTensor random_tt(const std::vector<Index>& modes,
                   const std::vector<Index>& ranks, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  std::vector<TtCore> cores;
  const Index d = static_cast<Index>(modes.size());
  for (Index k = 0; k < d; ++k) {
    const Index r0 = k == 0 ? 1 : ranks[static_cast<std::size_t>(k - 1)];
    const Index r1 = k == d - 1 ? 1 : ranks[static_cast<std::size_t>(k)];
    TtCore c(r0, modes[static_cast<std::size_t>(k)], r1);
    for (Index i = 0; i < r0; ++i) {
      for (Index j = 0; j < c.n; ++j) {
        for (Index l = 0; l < r1; ++l) c.at(i, j, l) = normal(rng);
      }
    }
    cores.push_back(std::move(c));
  }
  return TtTensor(std::move(cores));
}

void bm_tt_svd(benchmark::State& state) {
  std::mt19937 rng(1);
  const DenseTensor x =
      full(random_tt({20, 20, 4, 26}, {5, 5, 5}, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tt_svd(x, {1e-10}));
  }
}
BENCHMARK(bm_tt_svd);

void bm_round(benchmark::State& state) {
  std::mt19937 rng(2);
  const TtTensor t = random_tt({20, 20, 4, 26}, {8, 8, 8}, rng);
  const TtTensor doubled = tt_add(t, t);
  for (auto _ : state) {
    benchmark::DoNotOptimize(round(doubled, {1e-10}));
  }
}
BENCHMARK(bm_round);

void bm_tt_ls_solve(benchmark::State& state) {
  std::mt19937 rng(3);
  const TtTensor design = random_tt({6, 5, 40}, {4, 6}, rng);
  const TtTensor targets = random_tt({4, 40}, {3}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tt_ls_solve(design, targets, 1e-8));
  }
}
BENCHMARK(bm_tt_ls_solve);

void bm_heat_rhs(benchmark::State& state) {
  const Index n = state.range(0);
  const GridSpec2d g{n, n, 0.0, 1.0, 0.0, 1.0};
  PdeProblem p;
  const Eigen::VectorXd u = initial_condition(p, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(heat_rhs(u, g, 0.01));
  }
}
BENCHMARK(bm_heat_rhs)->Arg(20)->Arg(80);

void bm_burgers_rhs(benchmark::State& state) {
  const Index n = state.range(0);
  const GridSpec2d g{n, n, 0.0, 4.0, 0.0, 4.0};
  PdeProblem p;
  p.kind = PdeProblem::Kind::burgers;
  const Eigen::VectorXd u = initial_condition(p, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(burgers_rhs(u, g));
  }
}
BENCHMARK(bm_burgers_rhs)->Arg(20)->Arg(80);

void bm_pod(benchmark::State& state) {
  std::mt19937 rng(4);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd snaps(26, 400);
  for (Index i = 0; i < snaps.rows(); ++i) {
    for (Index j = 0; j < snaps.cols(); ++j) snaps(i, j) = normal(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(pod(snaps, 5));
  }
}
BENCHMARK(bm_pod);

}  // namespace

BENCHMARK_MAIN();
