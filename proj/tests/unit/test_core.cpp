#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <rsbench/dataset.hpp>
#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>
#include <rsbench/pairs.hpp>
#include <rsbench/parallel.hpp>
#include <rsbench/search.hpp>
#include <rsbench/seed.hpp>
#include <rsbench/vecs_io.hpp>

#include "test_support.hpp"

using namespace rsbench;
using rsbench::testing::random_dataset;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected rsbench::Error");
    return ErrorKind::invariant;
}

// Exhaustive scan in plain double, independent of the library kernel.
double naive_l2(std::span<const float> a, std::span<const float> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = double(a[i]) - double(b[i]);
        s += t * t;
    }
    return s;
}

} // namespace

TEST_CASE("VectorDataset validates shape and values") {
    VectorDataset v(2, {1, 2, 3, 4});
    CHECK(v.count() == 2);
    CHECK(v.row(1)[0] == 3.0f);
    CHECK(VectorDataset(3).count() == 0);
    CHECK(kind_of([] { VectorDataset(0, {}); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { VectorDataset(3, {1, 2}); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { VectorDataset(1, {std::numeric_limits<float>::quiet_NaN()}); }) ==
          ErrorKind::invalid_argument);
    CHECK(kind_of([] { VectorDataset(1, {std::numeric_limits<float>::infinity()}); }) ==
          ErrorKind::invalid_argument);

    const auto s = v.slice(1, 2);
    CHECK(s.count() == 1);
    CHECK(s.row(0)[1] == 4.0f);
    const std::vector<std::int64_t> ids = {1, 0, 1};
    const auto g = v.gather(ids);
    CHECK(g.count() == 3);
    CHECK(g.row(0)[0] == 3.0f);
    CHECK(g.row(1)[0] == 1.0f);
}

TEST_CASE("squared_l2 examples") {
    const std::vector<float> z = {0, 0};
    CHECK(squared_l2(z, z) == 0.0);
    const std::vector<float> e1 = {1, 0};
    const std::vector<float> e2 = {0, 1};
    CHECK(squared_l2(e1, e2) == 2.0);
    const std::vector<float> a = {1, 2, 3};
    const std::vector<float> b = {4, 6, 3};
    CHECK(squared_l2(a, b) == 25.0);
    CHECK(kind_of([&] { squared_l2(a, e1); }) == ErrorKind::invalid_argument);
}

TEST_CASE("squared_l2 agrees with a naive sum for every dimension up to 70") {
    for (std::size_t d = 1; d <= 70; ++d) {
        const auto x = random_dataset(2, d, 100 + d);
        const double got = squared_l2(x.row(0), x.row(1));
        CHECK(got == doctest::Approx(naive_l2(x.row(0), x.row(1))).epsilon(1e-12));
        CHECK(got == squared_l2(x.row(1), x.row(0)));
        CHECK(squared_l2(x.row(0), x.row(0)) == 0.0);
    }
}

TEST_CASE("byte and float loaders give bit-identical distances") {
    for (std::size_t d : {1, 7, 8, 15, 16, 24, 33, 64, 100}) {
        const auto x = random_dataset(2, d, d);
        std::vector<unsigned char> bytes(d * sizeof(float));
        std::memcpy(bytes.data(), x.row_ptr(1), bytes.size());
        CHECK(detail::l2sq(x.row_ptr(0), x.row_ptr(1), d) == detail::l2sq_bytes(x.row_ptr(0), bytes.data(), d));
    }
}

TEST_CASE("parallelogram identity on random triples") {
    // |a+b|^2 + |a-b|^2 = 2|a|^2 + 2|b|^2 with a = x - z, b = y - z:
    // |x+y-2z|^2 + |x-y|^2 = 2|x-z|^2 + 2|y-z|^2.
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng() % 64;
        const auto v = random_dataset(3, d, rng());
        std::vector<float> s(d);
        std::vector<float> zero(d, 0.0f);
        for (std::size_t i = 0; i < d; ++i) {
            s[i] = v.row(0)[i] + v.row(1)[i] - 2 * v.row(2)[i];
        }
        const double lhs = squared_l2(s, zero) + squared_l2(v.row(0), v.row(1));
        const double rhs = 2 * squared_l2(v.row(0), v.row(2)) + 2 * squared_l2(v.row(1), v.row(2));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
    }
}

TEST_CASE("brute_force_knn examples") {
    const VectorDataset db(2, {0, 0, 1, 0, 2, 0});
    const VectorDataset q(2, {0.1f, 0});
    auto r = brute_force_knn(q, db, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].db_id == 0);
    CHECK(r[0].dist2 == doctest::Approx(0.01).epsilon(1e-6));

    r = brute_force_knn(q, db, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0].db_id == 0);
    CHECK(r[1].db_id == 1);
    CHECK(r[2].db_id == 2);

    // Equidistant from ids 1 and 2.
    const VectorDataset mid(2, {1.5f, 0});
    r = brute_force_knn(mid, db, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].db_id == 1);

    CHECK(kind_of([&] { brute_force_knn(q, db, 4); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([&] { brute_force_knn(VectorDataset(3, {0, 0, 0}), db, 1); }) == ErrorKind::invalid_argument);
}

TEST_CASE("brute_force_range examples") {
    const VectorDataset db(1, {std::sqrt(0.5f), std::sqrt(1.5f)});
    const VectorDataset q(1, {0});
    CHECK(brute_force_range(q, db, 0.0).empty());
    CHECK(brute_force_range(q, db, 1e30).size() == 2);
    const auto r = brute_force_range(q, db, 1.0);
    REQUIRE(r.size() == 1);
    CHECK(r[0].db_id == 0);

    // Strict inequality at an exactly representable distance.
    const VectorDataset db2(1, {1.0f});
    CHECK(brute_force_range(q, db2, 1.0).empty());
}

TEST_CASE("brute force agrees with an exhaustive scan") {
    const auto q = random_dataset(13, 9, 1);
    const auto db = random_dataset(57, 9, 2);
    const std::size_t k = 5;
    const auto knn = brute_force_knn(q, db, k);
    REQUIRE(knn.size() == q.count() * k);
    for (std::size_t i = 0; i < q.count(); ++i) {
        std::vector<std::pair<float, std::int64_t>> all;
        for (std::size_t j = 0; j < db.count(); ++j) {
            all.emplace_back(static_cast<float>(naive_l2(q.row(i), db.row(j))), j);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t r = 0; r < k; ++r) {
            CHECK(knn[i * k + r].query_id == std::int64_t(i));
            CHECK(knn[i * k + r].db_id == all[r].second);
        }
    }
}

TEST_CASE("knn with k = count equals range with infinite radius") {
    const auto q = random_dataset(7, 5, 3);
    const auto db = random_dataset(40, 5, 4);
    const auto a = brute_force_knn(q, db, db.count());
    const auto b = brute_force_range(q, db, std::numeric_limits<double>::infinity());
    CHECK(a == b);
}

TEST_CASE("range results are nested in the radius") {
    const auto q = random_dataset(9, 6, 5);
    const auto db = random_dataset(200, 6, 6);
    PairList prev;
    for (double r2 : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 100.0}) {
        const auto cur = brute_force_range(q, db, r2);
        std::set<std::pair<std::int64_t, std::int64_t>> ids;
        for (const auto& p : cur) {
            ids.emplace(p.query_id, p.db_id);
            CHECK(p.dist2 < r2);
        }
        for (const auto& p : prev) {
            CHECK(ids.count({p.query_id, p.db_id}) == 1);
        }
        CHECK(std::is_sorted(cur.begin(), cur.end(), ByQueryThenDistance{}));
        prev = cur;
    }
}

TEST_CASE("ExactIndex smallest_pairs is the global top-n") {
    const auto q = random_dataset(11, 4, 8);
    const auto db = random_dataset(30, 4, 9);
    ExactIndex index(db);
    auto all = brute_force_range(q, db, std::numeric_limits<double>::infinity());
    std::sort(all.begin(), all.end(), ByDistanceThenIds{});
    for (std::size_t n : {0, 1, 17, 100, 330, 1000}) {
        const auto got = index.smallest_pairs(q, n);
        const std::size_t want = std::min(n, all.size());
        REQUIRE(got.size() == want);
        CHECK(std::equal(got.begin(), got.end(), all.begin()));
    }
    CHECK(index.knn(q, 3) == brute_force_knn(q, db, 3));
}

TEST_CASE("recall_at_1 counts matching first results") {
    const PairList exact = {{0, 5, 0.1f}, {1, 6, 0.2f}, {2, 7, 0.3f}};
    const PairList approx = {{0, 5, 0.1f}, {0, 9, 0.4f}, {2, 1, 0.2f}, {2, 7, 0.3f}};
    CHECK(recall_at_1(approx, exact, 3) == doctest::Approx(1.0 / 3));
    CHECK(recall_at_1(exact, exact, 3) == 1.0);
}

TEST_CASE("pair list validation") {
    PairList ok = {{0, 1, 0.5f}, {1, 0, 0.0f}};
    validate_pairs(ok, 2, 2);
    CHECK(kind_of([] { validate_pairs({{2, 0, 0.1f}}, 2, 2); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { validate_pairs({{0, -1, 0.1f}}, 2, 2); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { validate_pairs({{0, 0, -0.1f}}, 2, 2); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { validate_pairs({{0, 0, 0.1f}, {0, 0, 0.2f}}, 2, 2); }) == ErrorKind::invalid_argument);
    const auto counts = results_per_query({{0, 1, 0.5f}, {0, 2, 0.5f}, {2, 0, 0.1f}}, 3);
    CHECK(counts == std::vector<std::size_t>{2, 0, 1});
}

TEST_CASE("fvecs round trip and malformed files") {
    const auto x = random_dataset(17, 5, 11);
    CHECK(decode_fvecs(encode_fvecs(x)) == x);

    testing::TempDir dir;
    write_fvecs(dir / "x.fvecs", x);
    CHECK(read_fvecs(dir / "x.fvecs") == x);
    CHECK(std::filesystem::file_size(dir / "x.fvecs") == 17 * 4 * 6);

    std::string bytes = encode_fvecs(x);
    CHECK(kind_of([&] { decode_fvecs(bytes.substr(0, bytes.size() - 1)); }) == ErrorKind::data);
    CHECK(kind_of([&] { decode_fvecs(""); }) == ErrorKind::data);
    std::string bad_dim = bytes;
    bad_dim[4 * 6] = 4; // second record claims d = 4
    CHECK(kind_of([&] { decode_fvecs(bad_dim); }) == ErrorKind::data);
    std::string nan = bytes;
    const float qnan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(nan.data() + 4, &qnan, 4);
    CHECK(kind_of([&] { decode_fvecs(nan); }) == ErrorKind::data);
    CHECK(kind_of([&] { read_fvecs(dir / "missing.fvecs"); }) == ErrorKind::io);

    IntMatrix ids{3, {1, 2, 3, -4, 5, 6}};
    write_ivecs(dir / "ids.ivecs", ids);
    const auto back = read_ivecs(dir / "ids.ivecs");
    CHECK(back.dim == 3);
    CHECK(back.data == ids.data);
}

TEST_CASE("atomic writes replace whole files") {
    testing::TempDir dir;
    write_file_atomic(dir / "a.txt", "first");
    write_file_atomic(dir / "a.txt", "second");
    CHECK(read_file(dir / "a.txt") == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) {
        ++entries;
    }
    CHECK(entries == 1);
}

TEST_CASE("seed derivation separates streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s) {
        for (std::uint64_t stream = 1; stream <= 9; ++stream) {
            seen.insert(derive_seed(s, stream));
        }
    }
    CHECK(seen.size() == 36);
    CHECK(derive_seed(5, SeedStream::pq_training) == derive_seed(5, 5));
    CHECK(derive_seed(5, 5) == derive_seed(5, 5));
}

TEST_CASE("parallel_for covers the range once and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            ++hits[i];
        }
    });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t, std::size_t, std::size_t) { throw_error(ErrorKind::data, "x"); }),
                    Error);
    CHECK(exit_code_for(ErrorKind::config) == 2);
    CHECK(exit_code_for(ErrorKind::invalid_argument) == 2);
    CHECK(exit_code_for(ErrorKind::data) == 3);
    CHECK(exit_code_for(ErrorKind::io) == 3);
    CHECK(exit_code_for(ErrorKind::invariant) == 4);
}
