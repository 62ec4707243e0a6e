#include <benchmark/benchmark.h>

#include <random>

#include "nmpg/prox.hpp"

namespace {

nmpg::Vector random_vector(Eigen::Index n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  nmpg::Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

void BM_ProxL1(benchmark::State& state) {
  const nmpg::Vector v = random_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nmpg::prox_l1(v, 0.3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxL1)->Range(64, 1 << 14);

void BM_ProxL0(benchmark::State& state) {
  const nmpg::Vector v = random_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nmpg::prox_l0(v, 0.3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxL0)->Range(64, 1 << 14);

void BM_ProxLHalf(benchmark::State& state) {
  const nmpg::Vector v = random_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nmpg::prox_lhalf(v, 0.3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxLHalf)->Range(64, 1 << 12);

void BM_ProxSparsity(benchmark::State& state) {
  const nmpg::Vector v = random_vector(state.range(0));
  const auto s = static_cast<std::size_t>(state.range(0) / 10 + 1);
  for (auto _ : state) benchmark::DoNotOptimize(nmpg::prox_sparsity(v, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxSparsity)->Range(64, 1 << 14);

}  // namespace
