#include <benchmark/benchmark.h>

#include "rdual/market_builders.hpp"
#include "rdual/pricing.hpp"
#include "rdual/solvers.hpp"

namespace {

using namespace rdual;

ScenarioModel tree_model(std::size_t periods) {
  Market m = multiplicative_tree(1.0, {1.2, 0.85}, periods);
  const std::size_t n = m.scenario_count();
  Vector b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = 0.5 * static_cast<double>(i % 3) - 0.4;
  return ScenarioModel(uniform_space(n), std::move(m), Claim(std::move(b)));
}

PriorSet two_priors(std::size_t n) {
  Vector a(n), c(n);
  double sa = 0.0, sc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 1.0 + static_cast<double>(i);
    c[i] = static_cast<double>(n - i);
    sa += a[i];
    sc += c[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    a[i] /= sa;
    c[i] /= sc;
  }
  return PriorSet({a, c});
}

void BM_Primal(benchmark::State& state) {
  const auto model = tree_model(static_cast<std::size_t>(state.range(0)));
  const auto priors = two_priors(model.scenario_count());
  const auto u = exponential_utility();
  for (auto _ : state) benchmark::DoNotOptimize(solve_primal(model, priors, u).value);
}
BENCHMARK(BM_Primal)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_Dual(benchmark::State& state) {
  const auto model = tree_model(static_cast<std::size_t>(state.range(0)));
  const auto priors = two_priors(model.scenario_count());
  const auto u = exponential_utility();
  for (auto _ : state) benchmark::DoNotOptimize(solve_dual(model, priors, u).value);
}
BENCHMARK(BM_Dual)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_BuyerPrice(benchmark::State& state) {
  const auto model = tree_model(2);
  const auto priors = two_priors(model.scenario_count());
  const auto u = glued_utility();
  const double v0 = claimless_value(model, priors, u);
  for (auto _ : state) benchmark::DoNotOptimize(buyer_price(model, priors, u, v0));
}
BENCHMARK(BM_BuyerPrice)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
