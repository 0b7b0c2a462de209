#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <rsbench/distance.hpp>
#include <rsbench/isotonic.hpp>
#include <rsbench/itq.hpp>
#include <rsbench/pq.hpp>

using namespace rsbench;

namespace {

VectorDataset uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-1, 1);
    std::vector<float> v(n * d);
    for (auto& x : v) {
        x = u(rng);
    }
    return VectorDataset(d, std::move(v));
}

void BM_l2sq(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto x = uniform(2, d, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detail::l2sq(x.row_ptr(0), x.row_ptr(1), d));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * d * sizeof(float)));
}
BENCHMARK(BM_l2sq)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_fit_isotonic(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 4);
    std::vector<LabeledPair> pairs(n);
    for (auto& p : pairs) {
        p.dist2 = u(rng);
        p.label = std::uniform_real_distribution<double>(0, 1)(rng) < std::exp(-2 * p.dist2) ? 1 : 0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_isotonic(pairs));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_fit_isotonic)->Arg(1000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_adc_distance(benchmark::State& state) {
    const std::size_t d = 64;
    const auto m = static_cast<std::size_t>(state.range(0));
    const int bits = static_cast<int>(state.range(1));
    const auto train = uniform(5000, d, 3);
    const auto cb = train_pq(train, m, bits, 4, 5);
    const auto codes = encode_pq_batch(cb, train);
    const auto q = uniform(1, d, 5);
    const auto tables = adc_tables(cb, q.row(0));
    const std::size_t cs = cb.code_size();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(adc_distance(cb, tables, {codes.data() + (i % train.count()) * cs, cs}));
        ++i;
    }
}
BENCHMARK(BM_adc_distance)->Args({8, 8})->Args({16, 4})->Args({32, 8});

void BM_hamming(benchmark::State& state) {
    const auto bytes = static_cast<std::size_t>(state.range(0));
    std::vector<std::uint8_t> a(bytes, 0x5a);
    std::vector<std::uint8_t> b(bytes, 0xc3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detail::hamming_unchecked(a.data(), b.data(), bytes));
    }
}
BENCHMARK(BM_hamming)->Arg(8)->Arg(32);

} // namespace
