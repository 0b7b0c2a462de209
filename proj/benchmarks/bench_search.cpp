#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <rsbench/ivf.hpp>
#include <rsbench/kmeans.hpp>
#include <rsbench/pq.hpp>
#include <rsbench/rsm.hpp>
#include <rsbench/search.hpp>

using namespace rsbench;

namespace {

VectorDataset gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0, 1);
    std::vector<float> v(n * d);
    for (auto& x : v) {
        x = g(rng);
    }
    return VectorDataset(d, std::move(v));
}

struct Fixture {
    VectorDataset db = gaussian(50000, 64, 1);
    VectorDataset queries = gaussian(200, 64, 2);
    Centroids centroids = train_kmeans(db.slice(0, 20000), 256, 8, 3).centroids;
    IVFIndex flat = build_ivf(db, centroids, FlatCodec{}, false);
    IVFIndex pq = build_ivf(db, centroids, train_pq(db.slice(0, 20000), 8, 8, 4, 8), false);
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_brute_force_knn(benchmark::State& state) {
    const auto& f = fixture();
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_knn(f.queries, f.db, k));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.queries.count()));
}
BENCHMARK(BM_brute_force_knn)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ivf_knn(benchmark::State& state) {
    const auto& f = fixture();
    const IVFIndex& index = state.range(0) ? f.pq : f.flat;
    const auto nprobe = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ivf_search(index, f.queries, KnnSearch{10}, nprobe));
    }
    state.SetLabel(state.range(0) ? "PQ8x8" : "Flat");
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.queries.count()));
}
BENCHMARK(BM_ivf_knn)->ArgsProduct({{0, 1}, {1, 8, 64}})->Unit(benchmark::kMillisecond);

void BM_bulk_range_shortlist(benchmark::State& state) {
    const auto& f = fixture();
    const IvfSearcher s(f.flat, 16);
    const auto budget = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bulk_shortlist(s, f.queries, {budget, BudgetMode::range}));
    }
}
BENCHMARK(BM_bulk_range_shortlist)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

} // namespace
