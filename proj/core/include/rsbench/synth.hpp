#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <rsbench/dataset.hpp>
#include <rsbench/pairs.hpp>

namespace rsbench {

/// Parameters of the synthetic generator. Items are grouped; every group has
/// a random center, an item's latent content is center + content_spread * u
/// and its embedding is normalize(content + embedding_noise * eta), with u and
/// eta standard normal. Group sizes follow max(2, floor(c * rank^-gamma)),
/// with c chosen so that the grouped items fill
/// n_items * (1 - singleton_fraction); the remaining items are singletons.
struct SynthConfig {
    std::size_t dim = 64;
    std::size_t n_items = 310000;
    std::size_t n_queries = 10000;
    std::size_t n_train = 200000;
    std::size_t n_groups = 2000;
    double power_exponent = 1.5;
    double singleton_fraction = 0.984;
    double content_spread = 0.3;
    double embedding_noise = 0.3;
    double tau_strict = 3.2;
    double tau_relaxed = 3.5;
    std::uint64_t seed = 0;

    std::size_t n_db() const noexcept {
        return n_items - n_queries - n_train;
    }

    /// Throws ErrorKind::config naming the offending field.
    void validate() const;

    /// JSON object with every field. Keys not listed in the object keep their
    /// defaults, except dim, n_items, n_queries and n_train, which are
    /// required. Unknown keys and wrongly typed values are ErrorKind::config
    /// errors that name the key.
    static SynthConfig from_json(const std::string& text);
    std::string to_json() const;

    friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

/// Group sizes (largest first) for the grouped part of the item set. Throws
/// ErrorKind::config when n_groups groups of at least 2 items do not fit.
std::vector<std::size_t> group_sizes(const SynthConfig& config);

enum class OracleSetting { strict, relaxed };

const char* to_string(OracleSetting s) noexcept;
OracleSetting parse_oracle_setting(const std::string& s);

/// Ground truth over the whole item set. Items are numbered queries first,
/// then database, then training vectors.
class SynthOracle {
   public:
    SynthOracle(std::vector<std::int64_t> groups, VectorDataset content, double tau_strict, double tau_relaxed);

    /// Same group and ||content_a - content_b|| <= tau of the setting.
    bool label_items(std::size_t item_a, std::size_t item_b, OracleSetting setting) const;

    std::size_t n_items() const noexcept {
        return groups_.size();
    }
    std::int64_t group_of(std::size_t item) const;
    const std::vector<std::int64_t>& groups() const noexcept {
        return groups_;
    }
    const VectorDataset& content() const noexcept {
        return content_;
    }
    double tau(OracleSetting s) const noexcept {
        return s == OracleSetting::strict ? tau_strict_ : tau_relaxed_;
    }

   private:
    std::vector<std::int64_t> groups_;
    VectorDataset content_;
    double tau_strict_;
    double tau_relaxed_;
};

struct SynthDataset {
    SynthConfig config;
    VectorDataset queries;
    VectorDataset db;
    VectorDataset train;
    SynthOracle oracle;

    std::size_t query_item(std::int64_t query_id) const noexcept {
        return static_cast<std::size_t>(query_id);
    }
    std::size_t db_item(std::int64_t db_id) const noexcept {
        return config.n_queries + static_cast<std::size_t>(db_id);
    }
    std::size_t train_item(std::int64_t train_id) const noexcept {
        return config.n_queries + config.n_db() + static_cast<std::size_t>(train_id);
    }
};

/// Deterministic in config.seed.
SynthDataset generate(const SynthConfig& config);

/// Label of (query, database vector).
bool oracle_label(const SynthDataset& data, std::int64_t query_id, std::int64_t db_id, OracleSetting setting);

/// Writes queries.fvecs, db.fvecs, train.fvecs, labels.csv (item_id,group_id)
/// and config.json.
void save_dataset(const SynthDataset& data, const std::filesystem::path& dir);

/// Reads the vectors back and rebuilds the oracle by regenerating the latent
/// state from config.json. Throws ErrorKind::data if the regenerated groups or
/// vectors disagree with the files.
SynthDataset load_dataset(const std::filesystem::path& dir);

/// (rank, count) with per-query result counts sorted descending; queries
/// without results are included. Ranks start at 1.
std::vector<std::pair<std::size_t, std::size_t>> results_per_query_curve(const PairList& pairs, std::size_t n_queries);

} // namespace rsbench
