#pragma once

#include "anmin/anmin.hpp"
#include "anmin/baseline_gd.hpp"
#include "anmin/csv.hpp"
#include "anmin/datasets.hpp"
#include "anmin/records.hpp"
#include "anmin/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anmin {

enum class DatasetKind { csv, sin, sdf, dae };

/// Where a campaign's data comes from. CSV files and images are resolved
/// relative to the working directory.
struct DatasetSpec {
    DatasetKind kind = DatasetKind::csv;
    std::string id;  // defaults to the file stem or generator name

    // csv
    std::filesystem::path path;
    std::vector<std::string> targets;
    std::vector<std::string> drop;
    std::optional<std::filesystem::path> column_spec;

    // sin: n training rows and test_n (defaults to n) fresh test rows per split
    Eigen::Index n = 1000;
    Eigen::Index d = 3;
    Eigen::Index test_n = 0;

    // sdf (path is the mask) and dae (path is the image)
    bool normalize = false;
    PatchConfig patch;
    std::uint64_t noise_seed = 0;

    static DatasetSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// "generator:sin:n=1000,d=3", "generator:sdf:path=mask.png",
    /// "generator:dae:path=img.png,sigma=10", or a CSV path.
    static DatasetSpec parse(const std::string& text);

    std::string identifier() const;
    bool has_own_test_set() const noexcept { return kind == DatasetKind::sin; }
};

/// Full dataset for split-based protocols.
Dataset load_dataset(const DatasetSpec& spec);

enum class MethodKind { anmin, sgd, adam };

std::string_view to_string(MethodKind kind);
MethodKind method_kind_from_string(std::string_view name);

struct MethodConfig {
    std::string name;  // label, unique within a campaign
    MethodKind kind = MethodKind::anmin;
    double alpha = 0.0;
    Eigen::Index hidden = 64;
    HyperParams hp;
    AblationConfig ablation;
    GdConfig gd;

    static MethodConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

struct CampaignConfig {
    DatasetSpec dataset;
    std::vector<MethodConfig> methods;
    int splits = 1;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir = "campaign-out";
    int workers = 1;
    double train_fraction = 0.8;
    bool standardize = false;

    static CampaignConfig from_json(const nlohmann::json& j);
    static CampaignConfig from_json_file(const std::filesystem::path& path);
    void validate() const;
};

/// Trains one method on one train/test pair. Failures inside training are
/// returned as a record with `failed` set.
RunRecord run_single(const Dataset& train, const Dataset& test, const MethodConfig& method, std::uint64_t seed,
                     std::uint64_t split_index, const std::string& dataset_id);

struct SummaryRow {
    std::string label;
    std::string method;
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;         // runs contributing a defined value
    std::size_t failures = 0;  // runs that failed outright
};

/// Groups by label in first-seen order, one row per metric.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

struct CampaignResult {
    std::vector<RunRecord> records;
    std::vector<SummaryRow> summary;
    std::vector<std::filesystem::path> record_files;
};

/// Split i uses seed base_seed + i, shared by every method. Writes
/// <output_dir>/records/<label>-s<i>.jsonl and <output_dir>/summary.csv; the
/// summary is computed from the record files after all runs finish.
/// ANMIN_WORKERS, when set, overrides cfg.workers.
CampaignResult run_campaign(const CampaignConfig& cfg);

/// Worker count after applying the ANMIN_WORKERS override.
int effective_workers(int configured);

/// Paired t-test of metric(a) − metric(b) over shared split indices. Runs are
/// matched by label. Throws UnpairedRuns when the two labels cover different
/// splits.
PairedTTest compare(const std::vector<RunRecord>& records, const std::string& a, const std::string& b,
                    const std::string& metric);

}  // namespace anmin
