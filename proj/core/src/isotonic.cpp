#include <rsbench/isotonic.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>
#include <rsbench/parallel.hpp>

#include "topk.hpp"

namespace rsbench {

PositiveModel::PositiveModel(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    RSBENCH_CHECK(!breakpoints_.empty(), invalid_argument, "positive model needs a breakpoint");
    RSBENCH_CHECK(
            breakpoints_.size() == values_.size(),
            invalid_argument,
            "positive model: breakpoints and values differ in length");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        RSBENCH_CHECK(
                std::isfinite(breakpoints_[i]),
                invalid_argument,
                "positive model: non-finite breakpoint");
        RSBENCH_CHECK(
                values_[i] >= 0.0 && values_[i] <= 1.0,
                invalid_argument,
                "positive model: value outside [0, 1]");
        if (i > 0) {
            RSBENCH_CHECK(
                    breakpoints_[i] > breakpoints_[i - 1],
                    invalid_argument,
                    "positive model: breakpoints must be strictly increasing");
            RSBENCH_CHECK(
                    values_[i] <= values_[i - 1],
                    invalid_argument,
                    "positive model: values must be non-increasing");
        }
    }
}

PositiveModel PositiveModel::constant(double p) {
    return PositiveModel({0.0}, {p});
}

double PositiveModel::operator()(double dist2) const noexcept {
    if (!(dist2 > breakpoints_.front())) {
        return values_.front();
    }
    if (dist2 >= breakpoints_.back()) {
        return values_.back();
    }
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), dist2);
    const auto hi = static_cast<std::size_t>(it - breakpoints_.begin());
    const std::size_t lo = hi - 1;
    const double t = (dist2 - breakpoints_[lo]) / (breakpoints_[hi] - breakpoints_[lo]);
    const double v = values_[lo] + t * (values_[hi] - values_[lo]);
    return std::clamp(v, values_[hi], values_[lo]);
}

double PositiveModel::crossing(double level) const noexcept {
    if (values_.front() <= level) {
        return 0.0;
    }
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        if (values_[i + 1] <= level) {
            const double frac = (values_[i] - level) / (values_[i] - values_[i + 1]);
            return breakpoints_[i] + frac * (breakpoints_[i + 1] - breakpoints_[i]);
        }
    }
    return std::numeric_limits<double>::infinity();
}

std::string PositiveModel::to_csv() const {
    std::string out = "dist2,value\n";
    char buf[64];
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", breakpoints_[i], values_[i]);
        out += buf;
    }
    return out;
}

PositiveModel PositiveModel::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    RSBENCH_CHECK(std::getline(in, line), data, "model CSV: missing header");
    RSBENCH_CHECK(
            line == "dist2,value" || line == "dist2,value\r",
            data,
            "model CSV: unexpected header '" + line + "'");
    std::vector<double> bps;
    std::vector<double> vals;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        double a = 0;
        double b = 0;
        char tail = 0;
        const int n = std::sscanf(line.c_str(), "%lf,%lf%c", &a, &b, &tail);
        RSBENCH_CHECK(
                n == 2 || (n == 3 && tail == '\r'),
                data,
                "model CSV: cannot parse line " + std::to_string(lineno));
        bps.push_back(a);
        vals.push_back(b);
    }
    try {
        return PositiveModel(std::move(bps), std::move(vals));
    } catch (const Error& e) {
        throw Error(ErrorKind::data, std::string("model CSV: ") + e.what());
    }
}

void PositiveModel::save_csv(const std::filesystem::path& path) const {
    write_file_atomic(path, to_csv());
}

PositiveModel PositiveModel::load_csv(const std::filesystem::path& path) {
    return from_csv(read_file(path));
}

namespace {

struct Block {
    double sum;
    double weight;
    double x_first;
    double x_last;

    double mean() const {
        return sum / weight;
    }
};

} // namespace

PositiveModel isotonic_regression(std::span<const double> x, std::span<const double> y) {
    RSBENCH_CHECK(!x.empty(), invalid_argument, "isotonic regression needs at least one point");
    RSBENCH_CHECK(x.size() == y.size(), invalid_argument, "isotonic regression: x/y length mismatch");
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        RSBENCH_CHECK(std::isfinite(x[i]), invalid_argument, "isotonic regression: non-finite x");
        RSBENCH_CHECK(
                y[i] >= 0.0 && y[i] <= 1.0, invalid_argument, "isotonic regression: y outside [0, 1]");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b];
    });

    // Pool ties in x first, then run PAV for the non-increasing direction on
    // the weighted group means.
    std::vector<Block> blocks;
    blocks.reserve(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        const double xv = x[order[i]];
        double sum = 0;
        double w = 0;
        while (i < order.size() && x[order[i]] == xv) {
            sum += y[order[i]];
            w += 1;
            ++i;
        }
        blocks.push_back({sum, w, xv, xv});
        while (blocks.size() >= 2) {
            Block& prev = blocks[blocks.size() - 2];
            const Block& last = blocks.back();
            if (prev.mean() >= last.mean()) {
                break;
            }
            prev.sum += last.sum;
            prev.weight += last.weight;
            prev.x_last = last.x_last;
            blocks.pop_back();
        }
    }

    std::vector<double> bps;
    std::vector<double> vals;
    bps.reserve(2 * blocks.size());
    vals.reserve(2 * blocks.size());
    for (const Block& b : blocks) {
        const double v = std::clamp(b.mean(), 0.0, 1.0);
        bps.push_back(b.x_first);
        vals.push_back(v);
        if (b.x_last != b.x_first) {
            bps.push_back(b.x_last);
            vals.push_back(v);
        }
    }
    // Clamping can only matter through rounding; keep the sequence monotone.
    for (std::size_t k = 1; k < vals.size(); ++k) {
        vals[k] = std::min(vals[k], vals[k - 1]);
    }
    // Adjacent blocks can tie (runs of all-negative groups); interior points of
    // a flat run carry no information under linear interpolation.
    std::size_t out = 0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const bool interior = out > 0 && k + 1 < vals.size() && vals[out - 1] == vals[k] && vals[k + 1] == vals[k];
        if (!interior) {
            bps[out] = bps[k];
            vals[out] = vals[k];
            ++out;
        }
    }
    bps.resize(out);
    vals.resize(out);
    return PositiveModel(std::move(bps), std::move(vals));
}

PositiveModel fit_isotonic(std::span<const LabeledPair> pairs) {
    RSBENCH_CHECK(!pairs.empty(), invalid_argument, "fit_isotonic: no labeled pairs");
    std::vector<double> x(pairs.size());
    std::vector<double> y(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        RSBENCH_CHECK(
                pairs[i].label == 0 || pairs[i].label == 1,
                invalid_argument,
                "fit_isotonic: label " + std::to_string(pairs[i].label) + " is not 0 or 1");
        RSBENCH_CHECK(
                std::isfinite(pairs[i].dist2) && pairs[i].dist2 >= 0,
                invalid_argument,
                "fit_isotonic: distance must be finite and non-negative");
        x[i] = pairs[i].dist2;
        y[i] = pairs[i].label;
    }
    return isotonic_regression(x, y);
}

double squared_residual(const PositiveModel& model, std::span<const LabeledPair> pairs) {
    double s = 0;
    for (const auto& p : pairs) {
        const double r = model(p.dist2) - p.label;
        s += r * r;
    }
    return s;
}

std::vector<LabeledPair> collect_training_pairs(
        const VectorDataset& queries,
        const VectorDataset& db,
        const PairOracle& oracle,
        double r2_max,
        std::size_t n_far_negatives,
        std::uint64_t seed) {
    RSBENCH_CHECK(
            queries.dim() == db.dim(),
            invalid_argument,
            "collect_training_pairs: dimension mismatch");
    RSBENCH_CHECK(r2_max >= 0, invalid_argument, "collect_training_pairs: r2_max must be >= 0");
    const std::size_t nq = queries.count();
    const std::size_t nb = db.count();
    const std::uint64_t total = static_cast<std::uint64_t>(nq) * nb;

    std::vector<PairList> near(nq);
    parallel_for(nq, [&](std::size_t begin, std::size_t end, std::size_t) {
        detail::cross_scan(queries, begin, end, db, [&](std::size_t qi, std::size_t bi, float d2) {
            if (d2 < r2_max) {
                near[qi].push_back({static_cast<std::int64_t>(qi), static_cast<std::int64_t>(bi), d2});
            }
        });
    });
    std::uint64_t near_count = 0;
    for (const auto& l : near) {
        near_count += l.size();
    }
    const std::uint64_t far_count = total - near_count;

    auto dist_of = [&](std::uint64_t idx) {
        return static_cast<float>(
                detail::l2sq(queries.row_ptr(idx / nb), db.row_ptr(idx % nb), queries.dim()));
    };

    std::vector<std::uint64_t> far;
    if (far_count <= n_far_negatives) {
        far.reserve(far_count);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            if (!(dist_of(idx) < r2_max)) {
                far.push_back(idx);
            }
        }
    } else if (n_far_negatives > 0) {
        std::mt19937_64 rng(seed);
        if (2 * far_count >= total) {
            // Far pairs dominate: rejection sampling over the cross product is
            // uniform over far pairs and needs no enumeration.
            std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
            std::unordered_set<std::uint64_t> taken;
            taken.reserve(2 * n_far_negatives);
            while (far.size() < n_far_negatives) {
                const std::uint64_t idx = pick(rng);
                if (!(dist_of(idx) < r2_max) && taken.insert(idx).second) {
                    far.push_back(idx);
                }
            }
        } else {
            std::vector<std::uint64_t> all;
            all.reserve(far_count);
            for (std::uint64_t idx = 0; idx < total; ++idx) {
                if (!(dist_of(idx) < r2_max)) {
                    all.push_back(idx);
                }
            }
            std::sample(all.begin(), all.end(), std::back_inserter(far), n_far_negatives, rng);
        }
        std::sort(far.begin(), far.end());
    }

    std::vector<LabeledPair> out;
    out.reserve(near_count + far.size());
    for (const auto& l : near) {
        for (const Pair& p : l) {
            out.push_back({p.dist2, oracle(p.query_id, p.db_id) ? 1 : 0, p.query_id, p.db_id});
        }
    }
    for (std::uint64_t idx : far) {
        const auto q = static_cast<std::int64_t>(idx / nb);
        const auto x = static_cast<std::int64_t>(idx % nb);
        out.push_back({dist_of(idx), oracle(q, x) ? 1 : 0, q, x});
    }
    return out;
}

std::string labeled_pairs_to_csv(std::span<const LabeledPair> pairs) {
    std::string out = "query_id,db_id,dist2,label\n";
    char buf[96];
    for (const auto& p : pairs) {
        std::snprintf(
                buf,
                sizeof(buf),
                "%lld,%lld,%.9g,%d\n",
                static_cast<long long>(p.query_id),
                static_cast<long long>(p.db_id),
                p.dist2,
                p.label);
        out += buf;
    }
    return out;
}

std::vector<LabeledPair> labeled_pairs_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    RSBENCH_CHECK(std::getline(in, line), data, "pairs CSV: missing header");
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    RSBENCH_CHECK(
            line == "query_id,db_id,dist2,label",
            data,
            "pairs CSV: expected header 'query_id,db_id,dist2,label', got '" + line + "'");
    std::vector<LabeledPair> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        long long q = 0;
        long long x = 0;
        double d2 = 0;
        int label = 0;
        RSBENCH_CHECK(
                std::sscanf(line.c_str(), "%lld,%lld,%lf,%d", &q, &x, &d2, &label) == 4,
                data,
                "pairs CSV: cannot parse line " + std::to_string(lineno));
        RSBENCH_CHECK(
                label == 0 || label == 1,
                data,
                "pairs CSV: label must be 0 or 1 on line " + std::to_string(lineno));
        out.push_back({d2, label, q, x});
    }
    return out;
}

} // namespace rsbench
