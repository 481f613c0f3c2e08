#include "toeplitz/language.hpp"
#include "toeplitz/pq_toeplitz.hpp"

#include <benchmark/benchmark.h>

using namespace toeplitz;

static void BM_Evaluate(benchmark::State& state) {
  const ConstantWordSystem sys(HoleWord::parse("a?b?c"), 16);
  std::int64_t i = -state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sys.evaluate(i));
    if (++i >= state.range(0)) i = -state.range(0);
  }
}
BENCHMARK(BM_Evaluate)->Arg(1 << 10)->Arg(1 << 20)->Arg(1 << 30);

static void BM_Window(benchmark::State& state) {
  const ConstantWordSystem sys(HoleWord::parse("a?b?c"), 16);
  for (auto _ : state) benchmark::DoNotOptimize(sys.window({0, state.range(0)}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Window)->Arg(1 << 12)->Arg(1 << 16);

static void BM_StructuralCount(benchmark::State& state) {
  for (auto _ : state) {
    language::StructuralLanguage lang(HoleWord::parse("a?b?c"));
    benchmark::DoNotOptimize(lang.count(static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_StructuralCount)->Arg(50)->Arg(600);

static void BM_WindowedCounts(benchmark::State& state) {
  const ConstantWordSystem sys(HoleWord::parse("a?b?c"), 16);
  const std::string s = sys.window({-state.range(0), state.range(0)}).symbols();
  for (auto _ : state) benchmark::DoNotOptimize(language::distinct_factor_counts(s, 60));
}
BENCHMARK(BM_WindowedCounts)->Arg(1 << 12)->Arg(1 << 15);

static void BM_PhiApply(benchmark::State& state) {
  const auto w = HoleWord::parse("a?b?c");
  const ConstantWordSystem sys(w, 16);
  const pq::WindowMap phi = pq::make_phi(w, static_cast<unsigned>(state.range(0)));
  const std::string x = sys.window({0, 1 << 14}).symbols();
  for (auto _ : state) benchmark::DoNotOptimize(phi.apply(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_PhiApply)->Arg(1)->Arg(2);

BENCHMARK_MAIN();
