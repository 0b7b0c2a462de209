#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/isotonic.hpp>
#include <rsbench/search.hpp>

#include "test_support.hpp"

using namespace rsbench;

namespace {

std::vector<LabeledPair> pairs_of(const std::vector<double>& x, const std::vector<int>& y) {
    std::vector<LabeledPair> p;
    for (std::size_t i = 0; i < x.size(); ++i) {
        p.push_back({x[i], y[i]});
    }
    return p;
}

std::vector<double> values_at(const PositiveModel& m, const std::vector<double>& x) {
    std::vector<double> v;
    for (double xi : x) {
        v.push_back(m(xi));
    }
    return v;
}

} // namespace

TEST_CASE("fit_isotonic examples") {
    const auto a = fit_isotonic(pairs_of({1, 2}, {1, 0}));
    CHECK(values_at(a, {1, 2}) == std::vector<double>{1, 0});
    CHECK(squared_residual(a, pairs_of({1, 2}, {1, 0})) == 0.0);

    const std::vector<double> x4 = {1, 2, 3, 4};
    const auto b = fit_isotonic(pairs_of(x4, {1, 0, 1, 0}));
    CHECK(values_at(b, x4) == std::vector<double>{1, 0.5, 0.5, 0});
    CHECK(std::vector<double>(b.values().begin(), b.values().end()) == std::vector<double>{1, 0.5, 0.5, 0});

    const auto c = fit_isotonic(pairs_of({1, 2}, {0, 1}));
    CHECK(std::vector<double>(c.values().begin(), c.values().end()) == std::vector<double>{0.5, 0.5});
    CHECK(std::vector<double>(c.breakpoints().begin(), c.breakpoints().end()) == std::vector<double>{1, 2});
}

TEST_CASE("fit_isotonic pools equal distances to their label mean") {
    const auto m = fit_isotonic(pairs_of({1, 1, 1, 1, 2}, {1, 1, 1, 0, 0}));
    CHECK(m(1) == doctest::Approx(0.75));
    CHECK(m(2) == 0.0);
    const auto same = fit_isotonic(pairs_of({3, 3, 3}, {0, 1, 0}));
    CHECK(same.breakpoints().size() == 1);
    CHECK(same(0) == doctest::Approx(1.0 / 3));
}

TEST_CASE("fit_isotonic rejects bad input") {
    CHECK_THROWS_AS(fit_isotonic({}), Error);
    CHECK_THROWS_AS(fit_isotonic(pairs_of({1}, {2})), Error);
    CHECK_THROWS_AS(fit_isotonic(pairs_of({1}, {-1})), Error);
}

TEST_CASE("PAV matches exhaustive monotone partitions") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<double> x(n);
        std::vector<double> y(n);
        std::vector<LabeledPair> p;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 8); // frequent ties
            y[i] = static_cast<double>(rng() % 2);
            p.push_back({x[i], static_cast<int>(y[i])});
        }
        const auto m = fit_isotonic(p);
        CHECK(std::abs(squared_residual(m, p) - testing::exhaustive_isotonic_min(x, y)) <= 1e-9);
    }
}

TEST_CASE("fitted models are monotone, bounded and a fixed point") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 500;
        std::vector<LabeledPair> p;
        std::normal_distribution<double> noise(0, 0.3);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = std::abs(noise(rng)) * 4;
            const double prob = std::exp(-d);
            p.push_back({d, std::uniform_real_distribution<double>(0, 1)(rng) < prob ? 1 : 0});
        }
        const auto m = fit_isotonic(p);
        const auto bp = m.breakpoints();
        const auto v = m.values();
        CHECK(std::adjacent_find(bp.begin(), bp.end(), std::greater_equal<>()) == bp.end());
        CHECK(std::is_sorted(v.begin(), v.end(), std::greater<>()));
        CHECK(v.front() <= 1.0);
        CHECK(v.back() >= 0.0);

        std::vector<double> x;
        std::vector<double> fx;
        for (const auto& lp : p) {
            x.push_back(lp.dist2);
            fx.push_back(m(lp.dist2));
        }
        const auto again = isotonic_regression(x, fx);
        for (double xi : x) {
            CHECK(again(xi) == doctest::Approx(m(xi)).epsilon(1e-12));
        }
    }
}

TEST_CASE("flat runs collapse to their end points") {
    // Many zero labels after the last positive: one zero block, two breakpoints.
    std::vector<LabeledPair> p = {{0.1, 1}, {0.2, 1}};
    for (int i = 0; i < 100; ++i) {
        p.push_back({1.0 + i, 0});
    }
    const auto m = fit_isotonic(p);
    CHECK(m.breakpoints().size() == 4);
    CHECK(m(50.5) == 0.0);
    CHECK(squared_residual(m, p) == 0.0);
}

TEST_CASE("eval_model interpolates and clamps") {
    const PositiveModel m({0.5, 1.0}, {0.8, 0.2});
    CHECK(eval_model(m, 0.75) == doctest::Approx(0.5));
    CHECK(eval_model(m, 0.1) == doctest::Approx(0.8));
    CHECK(eval_model(m, 5.0) == doctest::Approx(0.2));
    CHECK(m.crossing(0.5) == doctest::Approx(0.75));
    CHECK(m.crossing(0.9) == 0.0);
    CHECK(std::isinf(m.crossing(0.1)));

    std::mt19937_64 rng(9);
    for (int t = 0; t < 50; ++t) {
        const auto f = testing::random_monotone_model(rng());
        double prev = 2.0;
        for (double r = 0; r < 5; r += 0.01) {
            const double v = f(r);
            CHECK(v <= prev);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
}

TEST_CASE("PositiveModel validation and CSV") {
    CHECK_THROWS_AS(PositiveModel({}, {}), Error);
    CHECK_THROWS_AS(PositiveModel({1, 1}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(PositiveModel({1, 2}, {0.2, 0.5}), Error);
    CHECK_THROWS_AS(PositiveModel({1}, {1.5}), Error);
    CHECK_THROWS_AS(PositiveModel({1, 2}, {0.5}), Error);

    const PositiveModel m({0.125, 0.3333333333333, 2}, {1, 0.123456789012, 0});
    const auto text = m.to_csv();
    CHECK(text.rfind("dist2,value\n", 0) == 0);
    const auto back = PositiveModel::from_csv(text);
    CHECK(back.breakpoints()[1] == doctest::Approx(0.333333333).epsilon(1e-9));
    CHECK(back.values()[1] == doctest::Approx(0.123456789).epsilon(1e-9));
    CHECK(back.to_csv() == text);

    try {
        PositiveModel::from_csv("r,f\n1,1\n");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::data);
    }
    CHECK_THROWS_AS(PositiveModel::from_csv("dist2,value\n1;1\n"), Error);
    CHECK_THROWS_AS(PositiveModel::from_csv("dist2,value\n2,0.5\n1,0.4\n"), Error);

    testing::TempDir dir;
    m.save_csv(dir / "m.csv");
    CHECK(PositiveModel::load_csv(dir / "m.csv").to_csv() == text);
}

TEST_CASE("collect_training_pairs") {
    const auto q = testing::random_dataset(6, 3, 1);
    const auto db = testing::random_dataset(50, 3, 2);
    auto oracle = [](std::int64_t a, std::int64_t b) { return (a + b) % 3 == 0; };

    const auto all = collect_training_pairs(q, db, oracle, 1e9, 0, 1);
    CHECK(all.size() == 300);
    for (const auto& p : all) {
        CHECK(p.label == (oracle(p.query_id, p.db_id) ? 1 : 0));
        CHECK(p.dist2 == doctest::Approx(squared_l2(q.row(p.query_id), db.row(p.db_id))).epsilon(1e-6));
    }

    const auto far = collect_training_pairs(q, db, oracle, 0.0, 40, 1);
    CHECK(far.size() == 40);
    std::set<std::pair<std::int64_t, std::int64_t>> ids;
    for (const auto& p : far) {
        ids.emplace(p.query_id, p.db_id);
    }
    CHECK(ids.size() == 40);

    const auto capped = collect_training_pairs(q, db, oracle, 0.0, 1000, 1);
    CHECK(capped.size() == 300);

    const double r2 = 0.8;
    const auto a = collect_training_pairs(q, db, oracle, r2, 25, 7);
    const auto b = collect_training_pairs(q, db, oracle, r2, 25, 7);
    REQUIRE(a.size() == b.size());
    std::size_t near = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].query_id == b[i].query_id);
        CHECK(a[i].db_id == b[i].db_id);
        near += a[i].dist2 < r2;
    }
    const auto exact_near = brute_force_range(q, db, r2).size();
    CHECK(near == exact_near);
    CHECK(a.size() == exact_near + 25);
}

TEST_CASE("labeled pair CSV round trip") {
    const std::vector<LabeledPair> p = {{0.5, 1, 0, 3}, {1.25, 0, 2, 1}};
    const auto text = labeled_pairs_to_csv(p);
    CHECK(text.rfind("query_id,db_id,dist2,label\n", 0) == 0);
    const auto back = labeled_pairs_from_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[1].dist2 == 1.25);
    CHECK(back[1].label == 0);
    CHECK(back[1].query_id == 2);
    CHECK_THROWS_AS(labeled_pairs_from_csv("query_id,db_id,dist2,label\n0,0,0.1,3\n"), Error);
}
