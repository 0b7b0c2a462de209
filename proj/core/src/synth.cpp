#include <rsbench/synth.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include <rsbench/distance.hpp>
#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>
#include <rsbench/seed.hpp>
#include <rsbench/vecs_io.hpp>

namespace rsbench {

using nlohmann::json;

void SynthConfig::validate() const {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) {
            throw_error(ErrorKind::config, "synth config: " + msg);
        }
    };
    need(dim >= 1, "'dim' must be positive");
    need(n_queries >= 1, "'n_queries' must be positive");
    need(n_train >= 2, "'n_train' must be at least 2");
    need(n_items > n_queries + n_train, "'n_items' must exceed n_queries + n_train");
    need(power_exponent > 0 && std::isfinite(power_exponent), "'power_exponent' must be positive");
    need(singleton_fraction >= 0 && singleton_fraction <= 1, "'singleton_fraction' must lie in [0, 1]");
    need(content_spread > 0 && std::isfinite(content_spread), "'content_spread' must be positive");
    need(embedding_noise > 0 && std::isfinite(embedding_noise), "'embedding_noise' must be positive");
    need(tau_strict > 0, "'tau_strict' must be positive");
    need(tau_strict < tau_relaxed && std::isfinite(tau_relaxed), "'tau_strict' must be below 'tau_relaxed'");
}

namespace {

template <class T>
void read_key(const json& j, const char* key, T& out, bool required) {
    if (!j.contains(key)) {
        if (required) {
            throw_error(ErrorKind::config, std::string("synth config: missing required key '") + key + "'");
        }
        return;
    }
    const json& v = j.at(key);
    bool ok;
    if constexpr (std::is_floating_point_v<T>) {
        ok = v.is_number();
    } else {
        ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    }
    if (!ok) {
        throw_error(ErrorKind::config, std::string("synth config: key '") + key + "' has the wrong type");
    }
    out = v.get<T>();
}

} // namespace

SynthConfig SynthConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_error(ErrorKind::config, std::string("synth config: invalid JSON: ") + e.what());
    }
    RSBENCH_CHECK(j.is_object(), config, "synth config: expected a JSON object");
    static const std::set<std::string> known = {
            "dim",           "n_items",       "n_queries",       "n_train",
            "n_groups",      "power_exponent", "singleton_fraction", "content_spread",
            "embedding_noise", "tau_strict",  "tau_relaxed",     "seed"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw_error(ErrorKind::config, "synth config: unknown key '" + key + "'");
        }
    }
    SynthConfig c;
    read_key(j, "dim", c.dim, true);
    read_key(j, "n_items", c.n_items, true);
    read_key(j, "n_queries", c.n_queries, true);
    read_key(j, "n_train", c.n_train, true);
    read_key(j, "n_groups", c.n_groups, false);
    read_key(j, "power_exponent", c.power_exponent, false);
    read_key(j, "singleton_fraction", c.singleton_fraction, false);
    read_key(j, "content_spread", c.content_spread, false);
    read_key(j, "embedding_noise", c.embedding_noise, false);
    read_key(j, "tau_strict", c.tau_strict, false);
    read_key(j, "tau_relaxed", c.tau_relaxed, false);
    read_key(j, "seed", c.seed, false);
    c.validate();
    return c;
}

std::string SynthConfig::to_json() const {
    json j = {
            {"dim", dim},
            {"n_items", n_items},
            {"n_queries", n_queries},
            {"n_train", n_train},
            {"n_groups", n_groups},
            {"power_exponent", power_exponent},
            {"singleton_fraction", singleton_fraction},
            {"content_spread", content_spread},
            {"embedding_noise", embedding_noise},
            {"tau_strict", tau_strict},
            {"tau_relaxed", tau_relaxed},
            {"seed", seed},
    };
    return j.dump(2) + "\n";
}

std::vector<std::size_t> group_sizes(const SynthConfig& config) {
    if (config.n_groups == 0 || config.singleton_fraction >= 1.0) {
        return {};
    }
    const auto budget = static_cast<std::size_t>(
            std::floor(static_cast<double>(config.n_items) * (1.0 - config.singleton_fraction)));
    RSBENCH_CHECK(
            2 * config.n_groups <= budget,
            config,
            "synth config: " + std::to_string(config.n_groups) + " groups of at least 2 items do not fit in the " +
                    std::to_string(budget) + " grouped items (n_items * (1 - singleton_fraction))");
    const double g = config.power_exponent;
    auto sizes_for = [&](double c) {
        std::vector<std::size_t> s(config.n_groups);
        for (std::size_t r = 0; r < s.size(); ++r) {
            const double v = std::floor(c * std::pow(static_cast<double>(r + 1), -g));
            s[r] = std::max<std::size_t>(2, v > 1e15 ? std::size_t{1} << 50 : static_cast<std::size_t>(v));
        }
        return s;
    };
    auto total = [](const std::vector<std::size_t>& s) {
        std::size_t t = 0;
        for (std::size_t v : s) {
            t += v;
        }
        return t;
    };
    // Largest scale c whose sizes still fit the budget.
    double lo = 0.0;
    double hi = static_cast<double>(budget) + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (total(sizes_for(mid)) <= budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return sizes_for(lo);
}

const char* to_string(OracleSetting s) noexcept {
    return s == OracleSetting::strict ? "strict" : "relaxed";
}

OracleSetting parse_oracle_setting(const std::string& s) {
    if (s == "strict") {
        return OracleSetting::strict;
    }
    if (s == "relaxed") {
        return OracleSetting::relaxed;
    }
    throw_error(ErrorKind::config, "unknown oracle setting '" + s + "' (expected strict or relaxed)");
}

SynthOracle::SynthOracle(std::vector<std::int64_t> groups, VectorDataset content, double tau_strict, double tau_relaxed)
        : groups_(std::move(groups)), content_(std::move(content)), tau_strict_(tau_strict), tau_relaxed_(tau_relaxed) {
    RSBENCH_CHECK(groups_.size() == content_.count(), invalid_argument, "oracle: one group per content row");
    RSBENCH_CHECK(tau_strict_ < tau_relaxed_, invalid_argument, "oracle: tau_strict must be below tau_relaxed");
}

std::int64_t SynthOracle::group_of(std::size_t item) const {
    RSBENCH_CHECK(item < groups_.size(), invalid_argument, "oracle: item id out of range");
    return groups_[item];
}

bool SynthOracle::label_items(std::size_t a, std::size_t b, OracleSetting setting) const {
    if (group_of(a) != group_of(b)) {
        return false;
    }
    const double t = tau(setting);
    return detail::l2sq(content_.row_ptr(a), content_.row_ptr(b), content_.dim()) <= t * t;
}

SynthDataset generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.n_items;
    const std::size_t d = config.dim;
    const auto sizes = group_sizes(config);

    std::vector<std::int64_t> groups;
    groups.reserve(n);
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        groups.insert(groups.end(), sizes[g], static_cast<std::int64_t>(g));
    }
    RSBENCH_CHECK(groups.size() <= n, invariant, "group sizes exceed the item count");
    for (std::int64_t s = static_cast<std::int64_t>(sizes.size()); groups.size() < n; ++s) {
        groups.push_back(s);
    }
    // The shuffled order is also the split: queries, then db, then train.
    std::mt19937_64 split_rng(derive_seed(config.seed, SeedStream::synth_split));
    std::shuffle(groups.begin(), groups.end(), split_rng);

    std::mt19937_64 rng(derive_seed(config.seed, SeedStream::synth_vectors));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> centers(sizes.size() * d);
    for (auto& c : centers) {
        c = normal(rng);
    }

    std::vector<float> content(n * d);
    std::vector<float> embed(n * d);
    std::vector<double> center(d);
    std::vector<double> e(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        if (g < sizes.size()) {
            std::copy_n(centers.begin() + static_cast<std::ptrdiff_t>(g * d), d, center.begin());
        } else {
            for (auto& c : center) {
                c = normal(rng);
            }
        }
        double norm2 = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = center[j] + config.content_spread * normal(rng);
            content[i * d + j] = static_cast<float>(v);
            e[j] = v + config.embedding_noise * normal(rng);
            norm2 += e[j] * e[j];
        }
        const double inv = norm2 > 0 ? 1.0 / std::sqrt(norm2) : 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            embed[i * d + j] = static_cast<float>(e[j] * inv);
        }
    }

    VectorDataset all(d, std::move(embed));
    const std::size_t nq = config.n_queries;
    const std::size_t ndb = config.n_db();
    return SynthDataset{
            config,
            all.slice(0, nq),
            all.slice(nq, nq + ndb),
            all.slice(nq + ndb, n),
            SynthOracle(std::move(groups), VectorDataset(d, std::move(content)), config.tau_strict, config.tau_relaxed),
    };
}

bool oracle_label(const SynthDataset& data, std::int64_t query_id, std::int64_t db_id, OracleSetting setting) {
    RSBENCH_CHECK(
            query_id >= 0 && static_cast<std::size_t>(query_id) < data.queries.count() && db_id >= 0 &&
                    static_cast<std::size_t>(db_id) < data.db.count(),
            invalid_argument,
            "oracle_label: id out of range");
    return data.oracle.label_items(data.query_item(query_id), data.db_item(db_id), setting);
}

void save_dataset(const SynthDataset& data, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    RSBENCH_CHECK(!ec, io, "cannot create " + dir.string() + ": " + ec.message());
    write_fvecs(dir / "queries.fvecs", data.queries);
    write_fvecs(dir / "db.fvecs", data.db);
    write_fvecs(dir / "train.fvecs", data.train);
    std::string labels = "item_id,group_id\n";
    const auto& groups = data.oracle.groups();
    for (std::size_t i = 0; i < groups.size(); ++i) {
        labels += std::to_string(i);
        labels += ',';
        labels += std::to_string(groups[i]);
        labels += '\n';
    }
    write_file_atomic(dir / "labels.csv", labels);
    write_file_atomic(dir / "config.json", data.config.to_json());
}

namespace {

std::vector<std::int64_t> parse_labels(const std::string& text, const std::string& what) {
    std::vector<std::int64_t> groups;
    std::size_t pos = text.find('\n');
    RSBENCH_CHECK(
            pos != std::string::npos && text.compare(0, pos, "item_id,group_id") == 0,
            data,
            what + ": expected header 'item_id,group_id'");
    ++pos;
    std::size_t line = 2;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string row = text.substr(pos, end - pos);
        long long item = 0;
        long long group = 0;
        char tail = 0;
        if (std::sscanf(row.c_str(), "%lld,%lld%c", &item, &group, &tail) != 2 ||
            item != static_cast<long long>(groups.size())) {
            throw_error(ErrorKind::data, what + ": malformed row " + std::to_string(line));
        }
        groups.push_back(group);
        pos = end + 1;
        ++line;
    }
    return groups;
}

} // namespace

SynthDataset load_dataset(const std::filesystem::path& dir) {
    SynthConfig config;
    try {
        config = SynthConfig::from_json(read_file(dir / "config.json"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::io) {
            throw;
        }
        throw_error(ErrorKind::data, (dir / "config.json").string() + ": " + e.what());
    }
    SynthDataset data = generate(config);
    const auto groups = parse_labels(read_file(dir / "labels.csv"), (dir / "labels.csv").string());
    RSBENCH_CHECK(
            groups == data.oracle.groups(),
            data,
            (dir / "labels.csv").string() + ": groups do not match the regenerated dataset");
    auto check = [&](const char* name, const VectorDataset& expect) {
        if (!(read_fvecs(dir / name) == expect)) {
            throw_error(ErrorKind::data, (dir / name).string() + ": vectors do not match config.json");
        }
    };
    check("queries.fvecs", data.queries);
    check("db.fvecs", data.db);
    check("train.fvecs", data.train);
    return data;
}

std::vector<std::pair<std::size_t, std::size_t>> results_per_query_curve(const PairList& pairs, std::size_t n_queries) {
    auto counts = results_per_query(pairs, n_queries);
    std::sort(counts.begin(), counts.end(), std::greater<>());
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.emplace_back(i + 1, counts[i]);
    }
    return out;
}

} // namespace rsbench
