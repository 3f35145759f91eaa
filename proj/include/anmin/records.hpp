#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anmin {

struct TraceRow {
    int iter = 0;
    double train_loss = 0.0;
    double train_mse = 0.0;
    std::optional<double> logdet;  // may hold -inf; empty for GD runs and the init row
    double wall_seconds = 0.0;
    std::string path;              // solver path for ANMIN rows, empty otherwise
};

/// One training run. Metrics that are undefined (e.g. R² on constant
/// targets) are stored as NaN in memory and null on disk.
struct RunRecord {
    std::string run_id;
    std::string dataset_id;
    std::string method;  // anmin | sgd | adam
    std::string label;   // method config name within a campaign; defaults to method
    double alpha = 0.0;
    nlohmann::json hyperparameters = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::uint64_t split_index = 0;
    std::vector<TraceRow> trace;
    double train_mse = 0.0;
    double test_mse = 0.0;
    double train_r2 = 0.0;
    double test_r2 = 0.0;
    std::string started_at;
    std::string finished_at;
    std::string code_version;
    bool failed = false;
    std::string error;

    /// Throws DataError when iterations are not strictly increasing or wall
    /// times decrease.
    void validate() const;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);

/// One JSON object per line.
void write_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_records(const std::filesystem::path& path);

/// Reads every *.jsonl file under `dir`, sorted by file name.
std::vector<RunRecord> read_record_dir(const std::filesystem::path& dir);

/// Metric by name: train_mse, test_mse, train_r2 or test_r2.
double metric_value(const RunRecord& record, const std::string& metric);
bool is_metric_name(const std::string& metric);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

/// One CSV per run named <run_id>.csv with columns
/// iter, wall_seconds, train_loss, train_mse, logdet, best_train_mse.
/// An absent logdet is an empty cell; -inf is written as "-inf".
std::vector<std::filesystem::path> export_traces(const std::vector<RunRecord>& records,
                                                 const std::filesystem::path& out_dir);

struct TraceCsvRow {
    int iter = 0;
    double wall_seconds = 0.0;
    double train_loss = 0.0;
    double train_mse = 0.0;
    std::optional<double> logdet;
    double best_train_mse = 0.0;
};

std::vector<TraceCsvRow> read_trace_csv(const std::filesystem::path& path);

}  // namespace anmin
