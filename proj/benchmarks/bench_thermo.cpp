// Spectral solves, cylinder masses, and the Monte Carlo path scan.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "seqgibbs/gibbs.hpp"
#include "seqgibbs/measure.hpp"
#include "seqgibbs/transfer.hpp"

using namespace seqgibbs;

namespace {

double renewal_coeff(std::int64_t k) {
  if (k == 0) return 0.0;
  return 2.0 * std::log(static_cast<double>(k + 1) / static_cast<double>(k + 2));
}

}  // namespace

static void BM_PerronSolve(benchmark::State& state) {
  const Potential g = Potential::renewal(renewal_coeff, 100000);
  const TruncationResult tr =
      truncate_potential(g, static_cast<int>(state.range(0)));
  const TransferMatrix t = build_transfer(tr.truncated);
  for (auto _ : state) benchmark::DoNotOptimize(solve_perron(t));
}
BENCHMARK(BM_PerronSolve)->DenseRange(6, 12, 2);

static void BM_ConformalMass(benchmark::State& state) {
  const Potential g = Potential::renewal(renewal_coeff, 100000);
  const TruncationResult tr = truncate_potential(g, 12);
  const TransferMatrix t = build_transfer(tr.truncated);
  const PerronData e = solve_perron(t);
  const CylinderMeasure nu = CylinderMeasure::conformal(t, e);
  const Word w = sample_path(t, e, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(nu.log_mass(w));
}
BENCHMARK(BM_ConformalMass)->RangeMultiplier(4)->Range(16, 1024);

static void BM_PathGrowthScan(benchmark::State& state) {
  const Potential g = Potential::renewal(renewal_coeff, 100000);
  const TruncationResult tr = truncate_potential(g, 12);
  const TransferMatrix t = build_transfer(tr.truncated);
  const PerronData e = solve_perron(t);
  const CylinderMeasure nu = CylinderMeasure::conformal(t, e);
  std::vector<Word> paths;
  for (int i = 0; i < 16; ++i)
    paths.push_back(sample_path(t, e, static_cast<int>(state.range(0)),
                                static_cast<std::uint64_t>(i)));
  const TailSpec zeros = TailSpec::zeros(Alphabet(2));
  for (auto _ : state)
    benchmark::DoNotOptimize(gibbs_time_growth(
        paths, nu, tr.truncated, e.pressure, std::exp(0.05), zeros, 64));
}
BENCHMARK(BM_PathGrowthScan)->RangeMultiplier(2)->Range(256, 1024);
