// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mfldp/kernels.hpp"
#include "mfldp/rng.hpp"

using namespace mfldp;

namespace {

SpacePtr line() {
  static const auto s = StateSpace::euclidean(1, -5, 5, 1000);
  return s;
}

Configuration points(std::size_t n) {
  Rng rng(1);
  std::normal_distribution<double> g;
  Configuration x(n, 1);
  for (auto& c : x.coords()) c = g(rng);
  return x;
}

DiscreteMeasure measure(std::size_t atoms, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> c(atoms), w(atoms, 1.0 / static_cast<double>(atoms));
  for (auto& v : c) v = u(rng);
  return DiscreteMeasure(line(), c, w);
}

template <class F>
void tuple_total(benchmark::State& state, F kernel) {
  const auto w = InteractionPotential::logarithmic(line(), 1.0);
  const auto x = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(w, x));
  state.SetComplexityN(state.range(0));
}

template <class F>
void triple_total(benchmark::State& state, F kernel) {
  const auto w = InteractionPotential::quadratic_product(line(), 0.3, 3);
  const auto x = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernel(w, x));
}

template <class F>
void atom_energy(benchmark::State& state, F kernel) {
  const auto w = InteractionPotential::logarithmic(line(), 1.0);
  const auto nu = measure(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernel(w, nu));
}

template <class F>
void cost_matrix(benchmark::State& state, F kernel) {
  const auto mu = measure(static_cast<std::size_t>(state.range(0)), 3);
  const auto nu = measure(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernel(mu, nu, 2.0));
}

template <class F>
void enumerate(benchmark::State& state, F kernel) {
  const LogTerm term = [](std::span<const std::size_t> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += x[i] == x[i + 1] ? 0.1 : -0.1;
    return s;
  };
  for (auto _ : state) benchmark::DoNotOptimize(kernel(3, static_cast<std::size_t>(state.range(0)), term));
}

}  // namespace

BENCHMARK_CAPTURE(tuple_total, serial, kernels::serial::tuple_total)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(tuple_total, omp, kernels::omp::tuple_total)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(triple_total, serial, kernels::serial::tuple_total)->Arg(100);
BENCHMARK_CAPTURE(triple_total, omp, kernels::omp::tuple_total)->Arg(100);
BENCHMARK_CAPTURE(atom_energy, serial, kernels::serial::atom_energy)->Arg(1000);
BENCHMARK_CAPTURE(atom_energy, omp, kernels::omp::atom_energy)->Arg(1000);
BENCHMARK_CAPTURE(cost_matrix, serial, kernels::serial::cost_matrix)->Arg(1000);
BENCHMARK_CAPTURE(cost_matrix, omp, kernels::omp::cost_matrix)->Arg(1000);
BENCHMARK_CAPTURE(enumerate, serial, kernels::serial::enumerate_log_sum)->Arg(12);
BENCHMARK_CAPTURE(enumerate, omp, kernels::omp::enumerate_log_sum)->Arg(12);

BENCHMARK_MAIN();
