// Micro-benchmarks for the hot paths: counter-based RNG draws, dominant
// eigenpairs, steering/pattern evaluation, channel synthesis, the reference
// beampattern solve, and full penalized design solves.

#include <benchmark/benchmark.h>

#include "radcom/beampattern.hpp"
#include "radcom/channel.hpp"
#include "radcom/experiments.hpp"
#include "radcom/hermitian.hpp"
#include "radcom/penalty.hpp"
#include "radcom/rng.hpp"

namespace {

using namespace radcom;

void bm_philox_normal_pair(benchmark::State& state) {
  const Philox rng(42);
  uint64_t ctr = 0;
  for (auto _ : state) {
    const Philox::NormalPair z = rng.normal_pair(7, ctr++);
    benchmark::DoNotOptimize(z.z0 + z.z1);
  }
}
BENCHMARK(bm_philox_normal_pair);

HermitianMatrix random_psd(int n) {
  const Philox rng(1234);
  CMatrix a(n, n);
  uint64_t ctr = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Philox::NormalPair z = rng.normal_pair(0, ctr++);
      a(i, j) = Complex(z.z0, z.z1);
    }
  }
  return HermitianMatrix(CMatrix(a * a.adjoint() / n));
}

void bm_eigen_max(benchmark::State& state) {
  const HermitianMatrix w = random_psd(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigen_max(w).value);
  }
}
BENCHMARK(bm_eigen_max)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void bm_steering_vector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(steering_vector(17.3, n).sum());
  }
}
BENCHMARK(bm_steering_vector)->Arg(4)->Arg(16)->Arg(64);

void bm_evaluate_pattern(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AngularGrid grid(61);
  const HermitianMatrix cov = random_psd(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_pattern(cov, grid).sum());
  }
}
BENCHMARK(bm_evaluate_pattern)->Arg(4)->Arg(10);

void bm_generate_channels(benchmark::State& state) {
  Scenario sc;
  sc.k_pairs = static_cast<int>(state.range(0));
  sc.radar_angles_deg = default_radar_angles(sc.k_pairs);
  uint64_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_channels(sc, trial++).h_c[0](0));
  }
}
BENCHMARK(bm_generate_channels)->Arg(1)->Arg(3);

void bm_ideal_pattern_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AngularGrid grid(61);
  const RVector desired = desired_pattern(grid, {0.0}, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ideal_pattern(n, 1.0, grid, desired).error_star);
  }
}
BENCHMARK(bm_ideal_pattern_solve)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void bm_design_solve(benchmark::State& state, const char* scheme) {
  const Scenario sc;
  const RadarContext ctx = make_radar_context(sc, 61);
  const ChannelSet ch = generate_channels(sc, 0);
  const PenaltyConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_scheme(scheme, ch, sc, ctx, cfg).unicast_sum_bits);
  }
}
BENCHMARK_CAPTURE(bm_design_solve, bb_noma, "bb_noma")
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_design_solve, tdma, "tdma")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_design_solve, cbf_no_sic, "cbf_no_sic")
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
