// Fiber-sum kernels: the forward pass against plain enumeration, and the
// interval machinery built on top of it.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "seqgibbs/factor_image.hpp"

using namespace seqgibbs;

namespace {

Potential lumpable_potential() {
  const double t[9] = {0.2, 0.3, 0.5, 0.4, 0.1, 0.5, 0.3, 0.3, 0.4};
  std::vector<double> logs;
  for (double v : t) logs.push_back(std::log(v));
  return Potential::locally_constant(Alphabet(3), 2, logs);
}

FactorMap lumpable_factor() {
  return FactorMap(Alphabet(3), Alphabet(2), {0, 0, 1});
}

Word zeros_word(int len) {
  return Word(Alphabet(2), std::vector<int>(static_cast<std::size_t>(len), 0));
}

}  // namespace

static void BM_FiberForwardPass(benchmark::State& state) {
  const Potential psi = lumpable_potential();
  const FactorMap pi = lumpable_factor();
  const Word z = zeros_word(static_cast<int>(state.range(0)));
  const TailSpec w = TailSpec::zeros(Alphabet(3));
  for (auto _ : state)
    benchmark::DoNotOptimize(fiber_log_sum(psi, pi, z, w, 0));
}
BENCHMARK(BM_FiberForwardPass)->DenseRange(4, 20, 4);

static void BM_FiberEnumeration(benchmark::State& state) {
  const Potential psi = lumpable_potential();
  const FactorMap pi = lumpable_factor();
  const Word z = zeros_word(static_cast<int>(state.range(0)));
  const TailSpec w = TailSpec::zeros(Alphabet(3));
  for (auto _ : state) {
    double acc = 0.0;
    const int width = static_cast<int>(z.length());
    for (const Word& x : FiberWordRange(pi, z))
      acc += std::exp(psi.birkhoff_sum(x, w, width).value);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_FiberEnumeration)->DenseRange(4, 12, 4);

static void BM_RatioInterval(benchmark::State& state) {
  const Potential psi = lumpable_potential();
  const FactorMap pi = lumpable_factor();
  const GibbsTimeSource id = GibbsTimeSource::identity();
  const int k = static_cast<int>(state.range(0));
  const Word z = zeros_word(k + 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(image_ratio_interval(psi, pi, z, k, id));
}
BENCHMARK(BM_RatioInterval)->DenseRange(2, 10, 2);

static void BM_ImageGibbsScan(benchmark::State& state) {
  const Potential psi = lumpable_potential();
  const FactorMap pi = lumpable_factor();
  const TransferMatrix t = build_transfer(psi);
  const PerronData e = solve_perron(t);
  const CylinderMeasure nu =
      CylinderMeasure::pushforward(CylinderMeasure::equilibrium(t, e), pi);
  const GibbsTimeSource id = GibbsTimeSource::identity();
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        scan_image_gibbs(nu, psi, pi, depth, 50.0 / 11.0, 8, id));
}
BENCHMARK(BM_ImageGibbsScan)->DenseRange(4, 8, 2);
