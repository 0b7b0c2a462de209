#include "rsbench_cli.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include <json.hpp>

#include <rsbench/distributions.hpp>
#include <rsbench/error.hpp>
#include <rsbench/fs.hpp>
#include <rsbench/isotonic.hpp>
#include <rsbench/ivf_io.hpp>
#include <rsbench/kmeans.hpp>
#include <rsbench/rsm.hpp>
#include <rsbench/search.hpp>
#include <rsbench/seed.hpp>

#ifndef RSBENCH_VERSION
#define RSBENCH_VERSION "0.0.0"
#endif

namespace rsbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads keys of a command configuration, recording the resolved value of each
// (defaults included) for the manifest.
class Config {
   public:
    Config(json j, std::string command) : j_(std::move(j)), command_(std::move(command)) {
        if (!j_.is_object()) {
            fail("expected a JSON object");
        }
    }

    template <class T>
    T get(const std::string& key, const T& fallback) {
        if (!j_.contains(key)) {
            seen_.insert(key);
            resolved_[key] = fallback;
            return fallback;
        }
        return require<T>(key);
    }

    template <class T>
    T require(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            fail("missing required key '" + key + "'");
        }
        const json& v = j_.at(key);
        check_type<T>(key, v);
        resolved_[key] = v;
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            fail("key '" + key + "' has the wrong type");
        }
    }

    bool has(const std::string& key) const {
        return j_.contains(key);
    }

    /// Raw access for keys with a flexible shape; the caller records the
    /// resolved form with set_resolved.
    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            fail("missing required key '" + key + "'");
        }
        return j_.at(key);
    }
    void set_resolved(const std::string& key, json v) {
        seen_.insert(key);
        resolved_[key] = std::move(v);
    }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.count(key)) {
                fail("unknown key '" + key + "'");
            }
        }
    }

    const json& resolved() const {
        return resolved_;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw_error(ErrorKind::config, command_ + " config: " + msg);
    }

   private:
    template <class T>
    void check_type(const std::string& key, const json& v) const {
        bool ok = true;
        if constexpr (std::is_same_v<T, bool>) {
            ok = v.is_boolean();
        } else if constexpr (std::is_floating_point_v<T>) {
            ok = v.is_number();
        } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
            ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
        } else if constexpr (std::is_integral_v<T>) {
            ok = v.is_number_integer();
        } else if constexpr (std::is_same_v<T, std::string>) {
            ok = v.is_string();
        } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
            ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) {
                     return e.is_number_unsigned() || (e.is_number_integer() && e.get<std::int64_t>() >= 0);
                 });
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); });
        }
        if (!ok) {
            fail("key '" + key + "' has the wrong type");
        }
    }

    json j_;
    std::string command_;
    std::set<std::string> seen_;
    json resolved_ = json::object();
};

struct Manifest {
    json inputs = json::array();
    json outputs = json::array();
    json columns = json::object();

    void output_csv(const fs::path& p, std::vector<std::string> cols) {
        outputs.push_back(p.string());
        columns[p.filename().string()] = std::move(cols);
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string num(double v) {
    return fmt("%.9g", v);
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) {
        s += (i ? "," : "") + header[i];
    }
    s += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            s += (i ? "," : "") + r[i];
        }
        s += '\n';
    }
    write_file_atomic(path, s);
}

std::vector<OracleSetting> parse_settings(Config& cfg) {
    std::vector<std::string> names = {"strict", "relaxed"};
    if (cfg.has("setting")) {
        const json& v = cfg.raw("setting");
        if (v.is_string()) {
            names = {v.get<std::string>()};
        } else if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
            names = v.get<std::vector<std::string>>();
        } else {
            cfg.fail("key 'setting' must be a string or a non-empty list of strings");
        }
    }
    std::vector<OracleSetting> out;
    for (const auto& n : names) {
        const OracleSetting s = parse_oracle_setting(n);
        if (std::find(out.begin(), out.end(), s) != out.end()) {
            cfg.fail("setting '" + n + "' listed twice");
        }
        out.push_back(s);
    }
    cfg.set_resolved("setting", names);
    return out;
}

// {"strict": "path", ...} -> model per setting.
std::vector<std::pair<OracleSetting, PositiveModel>> load_models(Config& cfg, const std::string& key, Manifest& m) {
    const json& v = cfg.raw(key);
    if (!v.is_object() || v.empty()) {
        cfg.fail("key '" + key + "' must map oracle settings to model CSV paths");
    }
    std::vector<std::pair<OracleSetting, PositiveModel>> out;
    for (const char* name : {"strict", "relaxed"}) {
        if (!v.contains(name)) {
            continue;
        }
        if (!v.at(name).is_string()) {
            cfg.fail("key '" + key + "." + name + "' must be a path");
        }
        const fs::path p = v.at(name).get<std::string>();
        m.inputs.push_back(p.string());
        out.emplace_back(parse_oracle_setting(name), PositiveModel::load_csv(p));
    }
    for (const auto& [name, _] : v.items()) {
        if (name != "strict" && name != "relaxed") {
            cfg.fail("key '" + key + "' has unknown setting '" + name + "'");
        }
    }
    cfg.set_resolved(key, v);
    return out;
}

SynthDataset load_dataset_from(Config& cfg, Manifest& m) {
    const fs::path dir = cfg.require<std::string>("dataset");
    m.inputs.push_back(dir.string());
    return load_dataset(dir);
}

std::size_t count_positives(const SynthDataset& data, const PairList& pairs, OracleSetting s) {
    std::size_t n = 0;
    for (const Pair& p : pairs) {
        n += oracle_label(data, p.query_id, p.db_id, s);
    }
    return n;
}

struct CoarseParams {
    std::size_t nlist;
    std::size_t iters;
    std::size_t n_train;
};

CoarseParams coarse_params(Config& cfg) {
    CoarseParams p;
    p.nlist = cfg.get<std::size_t>("nlist", 1024);
    p.iters = cfg.get<std::size_t>("kmeans_iters", 20);
    p.n_train = cfg.get<std::size_t>("kmeans_train", 65536);
    if (p.nlist == 0) {
        cfg.fail("key 'nlist' must be positive");
    }
    return p;
}

Centroids train_coarse(const VectorDataset& train, const CoarseParams& p, std::uint64_t seed) {
    const std::size_t n = p.n_train == 0 ? train.count() : std::max(p.n_train, p.nlist);
    RSBENCH_CHECK(
            train.count() >= p.nlist,
            config,
            "nlist = " + std::to_string(p.nlist) + " exceeds the " + std::to_string(train.count()) + " training vectors");
    const VectorDataset sample = subsample(train, n, derive_seed(seed, SeedStream::subsample));
    return train_kmeans(sample, p.nlist, p.iters, derive_seed(seed, SeedStream::coarse_kmeans)).centroids;
}

TrainingParams training_params(Config& cfg) {
    TrainingParams t;
    t.pq_train = cfg.get<std::size_t>("pq_train", t.pq_train);
    t.pq_iters = cfg.get<std::size_t>("pq_iters", t.pq_iters);
    t.itq_train = cfg.get<std::size_t>("itq_train", t.itq_train);
    t.itq_iters = cfg.get<std::size_t>("itq_iters", t.itq_iters);
    return t;
}

Assigner make_assigner(const std::string& kind, std::size_t rerank_factor, const Centroids& c, std::uint64_t seed) {
    if (kind == "exact") {
        return ExactAssigner{};
    }
    if (kind == "pq_approx") {
        return make_pq_assigner(c, rerank_factor, 0, 4, derive_seed(seed, SeedStream::assigner_training));
    }
    throw_error(ErrorKind::config, "unknown assigner '" + kind + "' (expected exact or pq_approx)");
}

// ---------------------------------------------------------------------------

void cmd_gen(const json& j, const fs::path& out, Manifest& m, json& resolved) {
    const SynthConfig config = SynthConfig::from_json(j.dump());
    const SynthDataset data = generate(config);
    save_dataset(data, out);
    resolved = json::parse(config.to_json());
    for (const char* f : {"queries.fvecs", "db.fvecs", "train.fvecs", "config.json"}) {
        m.outputs.push_back((out / f).string());
    }
    m.output_csv(out / "labels.csv", {"item_id", "group_id"});
    const auto sizes = group_sizes(config);
    std::printf(
            "generated %zu queries, %zu db, %zu train vectors (d=%zu); %zu groups, largest %zu\n",
            data.queries.count(), data.db.count(), data.train.count(), config.dim, sizes.size(),
            sizes.empty() ? std::size_t{0} : sizes.front());
}

void cmd_fit(Config& cfg, const fs::path& out, Manifest& m) {
    const SynthDataset data = load_dataset_from(cfg, m);
    const auto settings = parse_settings(cfg);
    const double r2_max = cfg.get<double>("r2_max", 1.0);
    const std::size_t n_far = cfg.get<std::size_t>("n_far", 100000);
    const std::size_t train_queries = cfg.get<std::size_t>("train_queries", 20000);
    const auto seed = cfg.get<std::uint64_t>("seed", 0);
    cfg.finish();
    if (!(r2_max > 0)) {
        cfg.fail("key 'r2_max' must be positive");
    }

    auto pairs = training_pairs(data, settings.front(), r2_max, n_far, train_queries, seed);
    for (OracleSetting s : settings) {
        relabel_training_pairs(pairs, data, s, train_queries);
        std::size_t pos = 0;
        for (const auto& p : pairs) {
            pos += p.label;
        }
        RSBENCH_CHECK(
                pos > 0,
                config,
                std::string("fit: no positive ") + to_string(s) + " pairs among " + std::to_string(pairs.size()) +
                        " training pairs; increase r2_max (currently " + num(r2_max) + ")");
        const PositiveModel model = fit_isotonic(pairs);
        const fs::path p = out / (std::string("model_") + to_string(s) + ".csv");
        model.save_csv(p);
        m.output_csv(p, {"dist2", "value"});
        std::printf(
                "%s: %zu pairs, %zu positive, f(0)=%.4f, f crosses 0.5 at dist2=%.4f\n",
                to_string(s), pairs.size(), pos, model(0.0), model.crossing(0.5));
    }
}

void cmd_build(Config& cfg, const fs::path& out, Manifest& m) {
    const SynthDataset data = load_dataset_from(cfg, m);
    const CoarseParams cp = coarse_params(cfg);
    const CodecSpec spec = parse_codec_spec(cfg.get<std::string>("codec", "Flat"));
    const bool residual = cfg.get<bool>("residual", false);
    const std::string assigner = cfg.get<std::string>("assigner", "exact");
    const std::size_t rerank = cfg.get<std::size_t>("rerank_factor", 8);
    const TrainingParams tp = training_params(cfg);
    const auto seed = cfg.get<std::uint64_t>("seed", 0);
    cfg.finish();

    Centroids centroids = train_coarse(data.train, cp, seed);
    Codec codec = train_codec(spec, data.train, centroids, residual, tp, seed);
    Assigner a = make_assigner(assigner, rerank, centroids, seed);
    const IVFIndex index = build_ivf(data.db, std::move(centroids), std::move(codec), residual, std::move(a));
    save_ivf(index, out, seed);
    for (const char* f : {"meta.json", "centroids.fvecs", "lists.bin"}) {
        m.outputs.push_back((out / f).string());
    }
    if (!std::holds_alternative<FlatCodec>(index.codec)) {
        m.outputs.push_back((out / "codec.bin").string());
    }
    if (assigner == "pq_approx") {
        m.outputs.push_back((out / "assigner.bin").string());
    }
    std::printf("built IVF%zu,%s%s over %zu vectors\n", index.nlist(), codec_name(index.codec).c_str(),
                residual ? " (residual)" : "", index.ntotal);
}

// An exact index or a loaded IVF index at a given nprobe.
struct Searcher {
    std::optional<IVFIndex> ivf;
    std::unique_ptr<SearchIndex> index;
};

Searcher open_searcher(Config& cfg, const SynthDataset& data, Manifest& m) {
    Searcher s;
    const std::string where = cfg.get<std::string>("index", "exact");
    if (where == "exact") {
        s.index = std::make_unique<ExactIndex>(data.db);
        return s;
    }
    m.inputs.push_back(where);
    s.ivf = load_ivf(where);
    RSBENCH_CHECK(s.ivf->ntotal == data.db.count() && s.ivf->dim() == data.db.dim(), data,
                  where + ": index does not match the dataset");
    s.index = std::make_unique<IvfSearcher>(*s.ivf, cfg.require<std::size_t>("nprobe"));
    return s;
}

void cmd_sweep_budget(Config& cfg, const fs::path& out, Manifest& m) {
    const SynthDataset data = load_dataset_from(cfg, m);
    const auto models = load_models(cfg, "models", m);
    const Searcher searcher = open_searcher(cfg, data, m);
    const auto budgets = cfg.require<std::vector<std::size_t>>("budgets");
    const auto mode_names = cfg.get<std::vector<std::string>>("modes", {"range", "knn"});
    cfg.finish();
    if (!std::is_sorted(budgets.begin(), budgets.end())) {
        cfg.fail("key 'budgets' must be ascending");
    }

    const ExactDistance exact(data.queries, data.db);
    std::vector<std::vector<std::string>> rows;
    for (const auto& name : mode_names) {
        const BudgetMode mode = parse_budget_mode(name);
        const auto lists = bulk_shortlists(*searcher.index, data.queries, budgets, mode);
        for (const auto& [setting, model] : models) {
            for (std::size_t i = 0; i < budgets.size(); ++i) {
                rows.push_back({to_string(setting), name, std::to_string(budgets[i]), std::to_string(lists[i].size()),
                                num(rsm_score(model, lists[i], exact)),
                                std::to_string(count_positives(data, lists[i], setting))});
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    const std::vector<std::string> header = {"setting", "mode", "budget", "realized_pairs", "rsm", "oracle_positives"};
    write_csv(out / "sweep_budget.csv", header, rows);
    m.output_csv(out / "sweep_budget.csv", header);
}

void cmd_sweep_nprobe(Config& cfg, const fs::path& out, Manifest& m) {
    const SynthDataset data = load_dataset_from(cfg, m);
    const fs::path model_path = cfg.require<std::string>("model");
    m.inputs.push_back(model_path.string());
    const PositiveModel model = PositiveModel::load_csv(model_path);
    const std::string where = cfg.require<std::string>("index");
    m.inputs.push_back(where);
    const auto nprobes = cfg.require<std::vector<std::size_t>>("nprobes");
    const std::size_t budget = cfg.require<std::size_t>("budget");
    cfg.finish();
    if (nprobes.empty() || !std::is_sorted(nprobes.begin(), nprobes.end())) {
        cfg.fail("key 'nprobes' must be a non-empty ascending list");
    }

    const IVFIndex index = load_ivf(where);
    RSBENCH_CHECK(index.ntotal == data.db.count() && index.dim() == data.db.dim(), data,
                  where + ": index does not match the dataset");
    const ExactDistance exact(data.queries, data.db);
    const PairList truth = brute_force_knn(data.queries, data.db, 1);
    std::vector<double> rsm;
    std::vector<double> recall;
    for (std::size_t np : nprobes) {
        const IvfSearcher s(index, np);
        rsm.push_back(rsm_score(model, bulk_shortlist(s, data.queries, {budget, BudgetMode::range}), exact));
        recall.push_back(recall_at_1(s.knn(data.queries, 1), truth, data.queries.count()));
    }
    const double max_rsm = *std::max_element(rsm.begin(), rsm.end());
    const double max_recall = *std::max_element(recall.begin(), recall.end());
    auto frac = [](double v, double max) { return max > 0 ? v / max : 0.0; };
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < nprobes.size(); ++i) {
        rows.push_back({std::to_string(nprobes[i]), num(rsm[i]), num(frac(rsm[i], max_rsm)), num(recall[i]),
                        num(frac(recall[i], max_recall))});
    }
    const std::vector<std::string> header = {"nprobe", "rsm", "rsm_fraction_of_max", "recall_at_1",
                                             "recall_fraction_of_max"};
    write_csv(out / "sweep_nprobe.csv", header, rows);
    m.output_csv(out / "sweep_nprobe.csv", header);
}

void cmd_codec_table(Config& cfg, const fs::path& out, Manifest& m) {
    const SynthDataset data = load_dataset_from(cfg, m);
    const auto models = load_models(cfg, "models", m);
    const json& bj = cfg.raw("budgets");
    std::map<OracleSetting, std::size_t> budget_of;
    for (const auto& [setting, _] : models) {
        const char* name = to_string(setting);
        if (!bj.is_object() || !bj.contains(name) || !bj.at(name).is_number_unsigned()) {
            cfg.fail(std::string("key 'budgets' needs a non-negative integer for '") + name + "'");
        }
        budget_of[setting] = bj.at(name).get<std::size_t>();
    }
    cfg.set_resolved("budgets", bj);
    const CoarseParams cp = coarse_params(cfg);
    const std::size_t nprobe = cfg.get<std::size_t>("nprobe", 16);
    const TrainingParams tp = training_params(cfg);
    const auto seed = cfg.get<std::uint64_t>("seed", 0);

    std::vector<std::pair<CodecSpec, bool>> codecs = {{CodecSpec{}, false}};
    std::vector<std::string> names = {"Flat"};
    json resolved_codecs = json::array();
    for (const json& c : cfg.raw("codecs")) {
        std::string name;
        bool residual = false;
        if (c.is_string()) {
            name = c.get<std::string>();
        } else if (c.is_object() && c.contains("codec") && c.at("codec").is_string()) {
            name = c.at("codec").get<std::string>();
            if (c.contains("residual")) {
                if (!c.at("residual").is_boolean()) {
                    cfg.fail("codecs[].residual must be a boolean");
                }
                residual = c.at("residual").get<bool>();
            }
        } else {
            cfg.fail("key 'codecs' must list codec names or {\"codec\", \"residual\"} objects");
        }
        const CodecSpec spec = parse_codec_spec(name);
        if (spec.kind == CodecSpec::Kind::flat && !residual) {
            continue; // the reference row is always present
        }
        codecs.emplace_back(spec, residual);
        resolved_codecs.push_back({{"codec", name}, {"residual", residual}});
    }
    cfg.set_resolved("codecs", resolved_codecs);
    cfg.finish();

    const Centroids centroids = train_coarse(data.train, cp, seed);
    RSBENCH_CHECK(nprobe >= 1 && nprobe <= centroids.k(), config, "codec-table: nprobe outside [1, nlist]");
    const ExactDistance exact(data.queries, data.db);
    const PairList truth = brute_force_knn(data.queries, data.db, 1);
    std::vector<std::size_t> budgets;
    for (const auto& [setting, _] : models) {
        budgets.push_back(budget_of[setting]);
    }

    std::vector<std::vector<std::string>> rows;
    for (const auto& [spec, residual] : codecs) {
        Codec codec = train_codec(spec, data.train, centroids, residual, tp, seed);
        const IVFIndex index = build_ivf(data.db, centroids, std::move(codec), residual);
        const IvfSearcher s(index, nprobe);
        const auto lists = bulk_shortlists(s, data.queries, budgets, BudgetMode::range);
        std::map<OracleSetting, double> rsm;
        for (std::size_t i = 0; i < models.size(); ++i) {
            rsm[models[i].first] = rsm_score(models[i].second, lists[i], exact);
        }
        auto cell = [&](OracleSetting st) { return rsm.count(st) ? num(rsm[st]) : std::string(); };
        const double recall = recall_at_1(s.knn(data.queries, 1), truth, data.queries.count());
        rows.push_back({std::to_string(index.code_size()), codec_name(index.codec), residual ? "1" : "0",
                        cell(OracleSetting::strict), cell(OracleSetting::relaxed), num(recall)});
        std::printf("%-10s residual=%d  rsm_strict=%s rsm_relaxed=%s recall@1=%.4f\n", codec_name(index.codec).c_str(),
                    residual ? 1 : 0, cell(OracleSetting::strict).c_str(), cell(OracleSetting::relaxed).c_str(),
                    recall);
        std::fflush(stdout);
    }
    const std::vector<std::string> header = {"code_size", "codec", "residual", "rsm_strict", "rsm_relaxed",
                                             "recall_at_1"};
    write_csv(out / "codec_table.csv", header, rows);
    m.output_csv(out / "codec_table.csv", header);
}

void cmd_density(Config& cfg, const fs::path& out, Manifest& m) {
    const auto dims = cfg.get<std::vector<std::size_t>>("dims", {10, 100});
    const auto dists = cfg.get<std::vector<std::string>>("distributions", {"gaussian", "uniform_sphere"});
    const std::size_t points = cfg.get<std::size_t>("points", 20001);
    const bool mode_norm = cfg.get<bool>("mode_normalize", true);
    cfg.finish();
    std::error_code ec;
    fs::create_directories(out, ec);
    for (const auto& dist : dists) {
        for (std::size_t d : dims) {
            DensityCurve c;
            if (dist == "gaussian") {
                c = gaussian_curve(static_cast<int>(d), points);
            } else if (dist == "uniform_sphere") {
                c = uniform_sphere_curve(static_cast<int>(d), points);
            } else {
                cfg.fail("unknown distribution '" + dist + "' (expected gaussian or uniform_sphere)");
            }
            c = mode_norm ? mode_normalize(c) : normalize(std::move(c));
            std::vector<std::vector<std::string>> rows;
            rows.reserve(c.r_values.size());
            for (std::size_t i = 0; i < c.r_values.size(); ++i) {
                rows.push_back({num(c.r_values[i]), num(c.density[i])});
            }
            const fs::path p = out / ("density_" + dist + "_d" + std::to_string(d) + ".csv");
            write_csv(p, {"r", "density"}, rows);
            m.output_csv(p, {"r", "density"});
        }
    }
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"gen",          "fit",         "build",  "sweep-budget",
                                                   "sweep-nprobe", "codec-table", "density"};
    return names;
}

CodecSpec parse_codec_spec(const std::string& s) {
    CodecSpec spec;
    auto bad = [&]() -> CodecSpec {
        throw_error(ErrorKind::config, "unknown codec '" + s + "' (expected Flat, PQ<m>x<bits> or ITQ<bits>)");
    };
    unsigned long a = 0;
    unsigned long b = 0;
    int used = 0;
    if (s == "Flat") {
        return spec;
    }
    if (std::sscanf(s.c_str(), "PQ%lux%lu%n", &a, &b, &used) == 2 && static_cast<std::size_t>(used) == s.size()) {
        if (a == 0 || (b != 4 && b != 8)) {
            return bad();
        }
        spec.kind = CodecSpec::Kind::pq;
        spec.m = a;
        spec.bits = b;
        return spec;
    }
    if (std::sscanf(s.c_str(), "ITQ%lu%n", &a, &used) == 1 && static_cast<std::size_t>(used) == s.size() && a > 0) {
        spec.kind = CodecSpec::Kind::itq;
        spec.bits = a;
        return spec;
    }
    return bad();
}

Codec train_codec(
        const CodecSpec& spec,
        const VectorDataset& train,
        const Centroids& centroids,
        bool residual,
        const TrainingParams& params,
        std::uint64_t seed) {
    RSBENCH_CHECK(
            !residual || spec.kind == CodecSpec::Kind::pq,
            config,
            "residual encoding is only supported for PQ codecs");
    switch (spec.kind) {
        case CodecSpec::Kind::flat:
            return FlatCodec{};
        case CodecSpec::Kind::pq: {
            VectorDataset sample = subsample(train, params.pq_train, derive_seed(seed, SeedStream::pq_training));
            if (residual) {
                const Assignment a = assign_nearest(centroids.vectors, sample);
                std::vector<float> r(sample.data().begin(), sample.data().end());
                const std::size_t d = sample.dim();
                for (std::size_t i = 0; i < sample.count(); ++i) {
                    const float* c = centroids.vectors.row_ptr(static_cast<std::size_t>(a.labels[i]));
                    for (std::size_t j = 0; j < d; ++j) {
                        r[i * d + j] -= c[j];
                    }
                }
                sample = VectorDataset(d, std::move(r));
            }
            return train_pq(sample, spec.m, static_cast<int>(spec.bits), derive_seed(seed, SeedStream::pq_training),
                            params.pq_iters);
        }
        case CodecSpec::Kind::itq:
            return train_itq(train, spec.bits, params.itq_iters, derive_seed(seed, SeedStream::itq_training),
                             params.itq_train)
                    .model;
    }
    throw_error(ErrorKind::invariant, "unreachable codec kind");
}

std::vector<LabeledPair> training_pairs(
        const SynthDataset& data,
        OracleSetting setting,
        double r2_max,
        std::size_t n_far,
        std::size_t train_queries,
        std::uint64_t seed) {
    const std::size_t n = data.train.count();
    RSBENCH_CHECK(
            train_queries >= 1 && train_queries < n,
            config,
            "train_queries must lie in [1, " + std::to_string(n - 1) + "]");
    const VectorDataset q = data.train.slice(0, train_queries);
    const VectorDataset db = data.train.slice(train_queries, n);
    const PairOracle oracle = [&](std::int64_t qi, std::int64_t di) {
        return data.oracle.label_items(data.train_item(qi), data.train_item(static_cast<std::int64_t>(train_queries) + di),
                                       setting);
    };
    return collect_training_pairs(q, db, oracle, r2_max, n_far, derive_seed(seed, SeedStream::training_pairs));
}

void relabel_training_pairs(
        std::vector<LabeledPair>& pairs,
        const SynthDataset& data,
        OracleSetting setting,
        std::size_t train_queries) {
    for (auto& p : pairs) {
        p.label = data.oracle.label_items(
                data.train_item(p.query_id), data.train_item(static_cast<std::int64_t>(train_queries) + p.db_id),
                setting);
    }
}

void run_command(const RunOptions& options) {
    const auto& names = command_names();
    RSBENCH_CHECK(
            std::find(names.begin(), names.end(), options.command) != names.end(),
            config,
            "unknown command '" + options.command + "'");
    const auto started = std::chrono::steady_clock::now();
    const std::string started_at = utc_now();

    json j;
    const std::string text = read_file(options.config_path);
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_error(ErrorKind::config, options.config_path.string() + ": invalid JSON: " + e.what());
    }
    RSBENCH_CHECK(j.is_object(), config, options.config_path.string() + ": expected a JSON object");
    if (options.seed) {
        j["seed"] = *options.seed;
    }

    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    RSBENCH_CHECK(!ec, io, "cannot create " + options.out_dir.string() + ": " + ec.message());

    Manifest m;
    m.inputs.push_back(options.config_path.string());
    json resolved;
    if (options.command == "gen") {
        cmd_gen(j, options.out_dir, m, resolved);
    } else {
        Config cfg(j, options.command);
        cfg.get<std::uint64_t>("seed", 0);
        const std::map<std::string, std::function<void(Config&, const fs::path&, Manifest&)>> table = {
                {"fit", cmd_fit},
                {"build", cmd_build},
                {"sweep-budget", cmd_sweep_budget},
                {"sweep-nprobe", cmd_sweep_nprobe},
                {"codec-table", cmd_codec_table},
                {"density", cmd_density},
        };
        table.at(options.command)(cfg, options.out_dir, m);
        resolved = cfg.resolved();
    }

    const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest = {
            {"command", options.command},
            {"schema_version", kSchemaVersion},
            {"version", RSBENCH_VERSION},
            {"config", resolved},
            {"seed", resolved.contains("seed") ? resolved["seed"] : json(0)},
            {"config_path", options.config_path.string()},
            {"out_dir", options.out_dir.string()},
            {"inputs", m.inputs},
            {"outputs", m.outputs},
            {"columns", m.columns},
            {"started_at", started_at},
            {"duration_seconds", seconds},
    };
    write_file_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace rsbench::cli
