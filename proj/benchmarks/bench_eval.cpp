#include <stepwise/builtins.hpp>
#include <stepwise/dsl.hpp>
#include <stepwise/verify.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace stepwise;

namespace {

PValueVector random_vector(std::size_t m)
{
    std::mt19937_64 rng(m);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(m);
    for (auto& x : p) x = u(rng) * u(rng);
    return PValueVector(std::move(p));
}

void BM_Builtin(benchmark::State& state, BuiltinName name)
{
    const auto p = random_vector(static_cast<std::size_t>(state.range(0)));
    const auto h = builtin(name, {0.05, 10});
    for (auto _ : state) benchmark::DoNotOptimize(h.evaluate(p, Level(0.05)));
    state.SetComplexityN(state.range(0));
}

void BM_Compiled(benchmark::State& state, const char* text)
{
    const auto p = random_vector(static_cast<std::size_t>(state.range(0)));
    const auto c = compile(*parse(text));
    for (auto _ : state) benchmark::DoNotOptimize(c.evaluate(p, Level(0.05)));
    state.SetComplexityN(state.range(0));
}

void BM_Parse(benchmark::State& state)
{
    const std::string text = "diff(union(bh(alpha), hochberg(0.05)), intersect(holm(alpha), complement(bonferroni(0.1), 0.1)))";
    for (auto _ : state) benchmark::DoNotOptimize(parse(text));
}

void BM_Monotonicity(benchmark::State& state)
{
    const auto c = compile(*parse("union(bh(alpha), hochberg(alpha))"));
    CheckConfig cfg;
    cfg.trials = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(check_monotonicity(c, cfg));
}

} // namespace

BENCHMARK_CAPTURE(BM_Builtin, bh, BuiltinName::BH)->RangeMultiplier(10)->Range(10, 100000)->Complexity();
BENCHMARK_CAPTURE(BM_Builtin, holm, BuiltinName::Holm)->RangeMultiplier(10)->Range(10, 100000)->Complexity();
BENCHMARK_CAPTURE(BM_Builtin, topk, BuiltinName::TopK)->RangeMultiplier(10)->Range(10, 100000)->Complexity();
BENCHMARK_CAPTURE(BM_Compiled, closed_union, "union(bh(0.05), hochberg(0.05))")->RangeMultiplier(10)->Range(10, 100000);
BENCHMARK_CAPTURE(BM_Compiled, output_intersect, "intersect(bh(0.05), topk(10))")->RangeMultiplier(10)->Range(10, 100000);
BENCHMARK(BM_Parse);
BENCHMARK(BM_Monotonicity);

BENCHMARK_MAIN();
