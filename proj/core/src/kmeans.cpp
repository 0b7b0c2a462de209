#include <rsbench/kmeans.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/parallel.hpp>

namespace rsbench {

Assignment assign_nearest(const VectorDataset& centroids, const VectorDataset& data) {
    RSBENCH_CHECK(centroids.dim() == data.dim(), invalid_argument, "assign_nearest: dimension mismatch");
    RSBENCH_CHECK(centroids.count() > 0, invalid_argument, "assign_nearest: no centroids");
    const std::size_t n = data.count();
    const std::size_t k = centroids.count();
    const std::size_t d = data.dim();
    Assignment a{std::vector<std::int64_t>(n), std::vector<double>(n)};
    parallel_for(n, [&](std::size_t begin, std::size_t end, std::size_t) {
        constexpr std::size_t kBlock = 64;
        std::vector<double> best(kBlock);
        for (std::size_t i0 = begin; i0 < end; i0 += kBlock) {
            const std::size_t i1 = std::min(end, i0 + kBlock);
            std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
            for (std::size_t c = 0; c < k; ++c) {
                const float* cv = centroids.row_ptr(c);
                for (std::size_t i = i0; i < i1; ++i) {
                    const double dd = detail::l2sq(data.row_ptr(i), cv, d);
                    if (dd < best[i - i0]) {
                        best[i - i0] = dd;
                        a.labels[i] = static_cast<std::int64_t>(c);
                    }
                }
            }
            for (std::size_t i = i0; i < i1; ++i) {
                a.dist2[i] = best[i - i0];
            }
        }
    });
    return a;
}

VectorDataset subsample(const VectorDataset& data, std::size_t n, std::uint64_t seed) {
    if (n >= data.count()) {
        return data;
    }
    std::vector<std::int64_t> all(data.count());
    std::iota(all.begin(), all.end(), std::int64_t{0});
    std::vector<std::int64_t> picked;
    picked.reserve(n);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), n, rng);
    return data.gather(picked);
}

namespace {

std::vector<float> kmeanspp_seed(const VectorDataset& data, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = data.count();
    const std::size_t d = data.dim();
    std::vector<float> centers;
    centers.reserve(k * d);
    std::vector<double> closest(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);

    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::size_t pick = first(rng);
    for (std::size_t c = 0; c < k; ++c) {
        chosen[pick] = 1;
        const float* p = data.row_ptr(pick);
        centers.insert(centers.end(), p, p + d);
        if (c + 1 == k) {
            break;
        }
        parallel_for(n, [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t i = begin; i < end; ++i) {
                closest[i] = std::min(closest[i], detail::l2sq(data.row_ptr(i), p, d));
            }
        });
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            total += chosen[i] ? 0.0 : closest[i];
        }
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) {
                    continue;
                }
                target -= closest[i];
                if (target <= 0 && closest[i] > 0) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                // Rounding left target marginally positive: take the last candidate.
                for (std::size_t i = n; i-- > 0;) {
                    if (!chosen[i] && closest[i] > 0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // Every remaining point duplicates a center; any unchosen one will do.
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    rest.push_back(i);
                }
            }
            std::uniform_int_distribution<std::size_t> u(0, rest.size() - 1);
            pick = rest[u(rng)];
        }
    }
    return centers;
}

} // namespace

KMeansResult train_kmeans(const VectorDataset& data, std::size_t k, std::size_t iters, std::uint64_t seed) {
    RSBENCH_CHECK(k > 0, invalid_argument, "k-means needs k >= 1");
    RSBENCH_CHECK(
            data.count() >= k,
            invalid_argument,
            "k-means needs at least k = " + std::to_string(k) + " points, got " +
                    std::to_string(data.count()));
    const std::size_t n = data.count();
    const std::size_t d = data.dim();
    std::mt19937_64 rng(seed);
    VectorDataset centers(d, kmeanspp_seed(data, k, rng));

    KMeansResult result{Centroids{centers}, {}};
    for (std::size_t it = 0; it < iters; ++it) {
        Assignment a = assign_nearest(centers, data);
        result.inertia.push_back(std::accumulate(a.dist2.begin(), a.dist2.end(), 0.0));

        std::vector<std::size_t> sizes(k, 0);
        for (auto l : a.labels) {
            sizes[static_cast<std::size_t>(l)]++;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            const auto largest = static_cast<std::size_t>(
                    std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
            if (sizes[largest] < 2) {
                break;
            }
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (static_cast<std::size_t>(a.labels[i]) == largest &&
                    (far == n || a.dist2[i] > a.dist2[far])) {
                    far = i;
                }
            }
            a.labels[far] = static_cast<std::int64_t>(c);
            a.dist2[far] = 0;
            sizes[largest]--;
            sizes[c] = 1;
        }

        std::vector<double> sums(k * d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(a.labels[i]);
            const float* x = data.row_ptr(i);
            for (std::size_t j = 0; j < d; ++j) {
                sums[c * d + j] += x[j];
            }
        }
        std::vector<float> next(centers.data().begin(), centers.data().end());
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                next[c * d + j] = static_cast<float>(sums[c * d + j] / static_cast<double>(sizes[c]));
            }
        }
        centers = VectorDataset(d, std::move(next));
    }
    const Assignment final_assign = assign_nearest(centers, data);
    result.inertia.push_back(std::accumulate(final_assign.dist2.begin(), final_assign.dist2.end(), 0.0));
    result.centroids = Centroids{std::move(centers)};
    return result;
}

} // namespace rsbench
