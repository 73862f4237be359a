// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "support/random_problems.hpp"
#include "tilq/feedback.hpp"
#include "tilq/simulation.hpp"

using namespace tilq;

namespace {

struct Setup {
    ProblemData p;
    InitialPair start;
    PolicySpec policy;
};

const Setup& setup(int N) {
    static std::map<int, Setup> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    std::mt19937_64 rng(N);
    ProblemData p = testing::random_problem(rng, {.N = N, .n = 4, .m = 2, .definite = true});
    Vector x = testing::random_vector(rng, 4);
    Strategy s{solve_feedback(p).Phi};
    return cache.emplace(N, Setup{p, {0, x}, s}).first->second;
}

void BM_exact_parallel(benchmark::State& st) {
    const Setup& s = setup(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(exact_expected_cost(s.p, 0, s.start, s.policy, NoiseModel::rademacher()));
    st.SetItemsProcessed(st.iterations() * (std::int64_t{1} << st.range(0)));
}

void BM_exact_serial(benchmark::State& st) {
    const Setup& s = setup(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(exact_expected_cost_serial(s.p, 0, s.start, s.policy, NoiseModel::rademacher()));
    st.SetItemsProcessed(st.iterations() * (std::int64_t{1} << st.range(0)));
}

void BM_monte_carlo_parallel(benchmark::State& st) {
    const Setup& s = setup(12);
    const auto n = static_cast<std::size_t>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(monte_carlo_cost(s.p, 0, s.start, s.policy, NoiseModel::gaussian(), n, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_monte_carlo_serial(benchmark::State& st) {
    const Setup& s = setup(12);
    const auto n = static_cast<std::size_t>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(monte_carlo_cost_serial(s.p, 0, s.start, s.policy, NoiseModel::gaussian(), n, 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_exact_parallel)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_exact_serial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_monte_carlo_parallel)->Arg(1 << 16)->Arg(1 << 19)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_monte_carlo_serial)->Arg(1 << 16)->Arg(1 << 19)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
