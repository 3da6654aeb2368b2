#include <benchmark/benchmark.h>

#include <random>

#include "momexp/expm.hpp"
#include "momexp/jordan.hpp"
#include "momexp/series.hpp"

namespace {

using namespace momexp;

FloatMatrix random_matrix(std::size_t n, double norm, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    FloatMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Float{d(rng), d(rng)};
    }
    return m * Float{norm / row_sum_norm(m)};
}

ExactMatrix example1()
{
    ExactMatrix a(3);
    a(0, 0) = Exact{1};
    a(0, 2) = Exact{1};
    a(1, 0) = Exact{1};
    a(1, 1) = Exact{2};
    a(2, 2) = Exact{1};
    return a;
}

void BM_EvalExpFloat(benchmark::State& state)
{
    const auto a = random_matrix(static_cast<std::size_t>(state.range(0)), 2.0, 1);
    const auto seq = MomentSequence::mittag_leffler(2.0);
    for (auto _ : state) benchmark::DoNotOptimize(eval_exp(a, Float{0.8, 0.3}, seq));
}
BENCHMARK(BM_EvalExpFloat)->Arg(3)->Arg(8)->Arg(16);

void BM_EvalExpExact(benchmark::State& state)
{
    const auto a = example1();
    const auto seq = MomentSequence::q_factorial(mpq_class(2));
    for (auto _ : state) benchmark::DoNotOptimize(eval_exp(a, Exact{mpq_class(1, 2)}, seq));
}
BENCHMARK(BM_EvalExpExact);

void BM_CauchyProductExact(benchmark::State& state)
{
    const auto order = static_cast<std::size_t>(state.range(0));
    const auto seq = MomentSequence::q_factorial(mpq_class(2));
    const auto e = exp_series(example1(), seq, order);
    const auto inv = inverse_series(example1(), seq, order);
    for (auto _ : state) benchmark::DoNotOptimize(cauchy_product(inv, e));
}
BENCHMARK(BM_CauchyProductExact)->Arg(10)->Arg(20)->Arg(40);

void BM_JordanDecomposeFloat(benchmark::State& state)
{
    const auto a = random_matrix(static_cast<std::size_t>(state.range(0)), 4.0, 2);
    for (auto _ : state) benchmark::DoNotOptimize(jordan_decompose(a));
}
BENCHMARK(BM_JordanDecomposeFloat)->Arg(3)->Arg(6);

void BM_JordanDecomposeExact(benchmark::State& state)
{
    const auto a = example1();
    for (auto _ : state) benchmark::DoNotOptimize(jordan_decompose(a));
}
BENCHMARK(BM_JordanDecomposeExact);

} // namespace

BENCHMARK_MAIN();
