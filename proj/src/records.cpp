#include "anmin/records.hpp"

#include "anmin/csv.hpp"
#include "anmin/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

namespace anmin {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double number_or_nan(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

// JSON has no infinities, so they travel as strings.
json encode_logdet(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isinf(*v)) return *v < 0 ? "-inf" : "inf";
    return *v;
}

std::optional<double> decode_logdet(const json& j) {
    if (j.is_null()) return std::nullopt;
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

}  // namespace

void RunRecord::validate() const {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].iter <= trace[i - 1].iter) throw DataError("run " + run_id + ": trace iterations not increasing");
        if (trace[i].wall_seconds < trace[i - 1].wall_seconds)
            throw DataError("run " + run_id + ": wall_seconds decreases");
    }
}

json to_json(const RunRecord& r) {
    json trace = json::array();
    for (const auto& row : r.trace) {
        json t = {{"iter", row.iter},
                  {"train_loss", number_or_null(row.train_loss)},
                  {"train_mse", number_or_null(row.train_mse)},
                  {"logdet", encode_logdet(row.logdet)},
                  {"wall_seconds", row.wall_seconds}};
        if (!row.path.empty()) t["path"] = row.path;
        trace.push_back(std::move(t));
    }
    json j = {{"run_id", r.run_id},
              {"dataset_id", r.dataset_id},
              {"method", r.method},
              {"label", r.label},
              {"alpha", r.alpha},
              {"hyperparameters", r.hyperparameters},
              {"seed", r.seed},
              {"split_index", r.split_index},
              {"trace", std::move(trace)},
              {"train_mse", number_or_null(r.train_mse)},
              {"test_mse", number_or_null(r.test_mse)},
              {"train_r2", number_or_null(r.train_r2)},
              {"test_r2", number_or_null(r.test_r2)},
              {"started_at", r.started_at},
              {"finished_at", r.finished_at},
              {"code_version", r.code_version},
              {"failed", r.failed}};
    if (r.failed) j["error"] = r.error;
    return j;
}

RunRecord record_from_json(const json& j) {
    try {
        RunRecord r;
        r.run_id = j.at("run_id").get<std::string>();
        r.dataset_id = j.at("dataset_id").get<std::string>();
        r.method = j.at("method").get<std::string>();
        r.label = j.value("label", r.method);
        r.alpha = j.at("alpha").get<double>();
        r.hyperparameters = j.value("hyperparameters", json::object());
        r.seed = j.at("seed").get<std::uint64_t>();
        r.split_index = j.at("split_index").get<std::uint64_t>();
        for (const auto& t : j.at("trace")) {
            TraceRow row;
            row.iter = t.at("iter").get<int>();
            row.train_loss = number_or_nan(t.at("train_loss"));
            row.train_mse = number_or_nan(t.at("train_mse"));
            row.logdet = decode_logdet(t.value("logdet", json(nullptr)));
            row.wall_seconds = t.at("wall_seconds").get<double>();
            row.path = t.value("path", std::string{});
            r.trace.push_back(std::move(row));
        }
        r.train_mse = number_or_nan(j.at("train_mse"));
        r.test_mse = number_or_nan(j.at("test_mse"));
        r.train_r2 = number_or_nan(j.at("train_r2"));
        r.test_r2 = number_or_nan(j.at("test_r2"));
        r.started_at = j.value("started_at", std::string{});
        r.finished_at = j.value("finished_at", std::string{});
        r.code_version = j.value("code_version", std::string{});
        r.failed = j.value("failed", false);
        r.error = j.value("error", std::string{});
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed run record: ") + e.what());
    }
}

void write_records(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& r : records) out << to_json(r).dump() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<RunRecord> records;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno, static_cast<long>(e.byte));
        }
        records.push_back(record_from_json(j));
    }
    return records;
}

std::vector<RunRecord> read_record_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> all;
    for (const auto& f : files) {
        auto part = read_records(f);
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return all;
}

bool is_metric_name(const std::string& metric) {
    return metric == "train_mse" || metric == "test_mse" || metric == "train_r2" || metric == "test_r2";
}

double metric_value(const RunRecord& r, const std::string& metric) {
    if (metric == "train_mse") return r.train_mse;
    if (metric == "test_mse") return r.test_mse;
    if (metric == "train_r2") return r.train_r2;
    if (metric == "test_r2") return r.test_r2;
    throw ConfigError("unknown metric '" + metric + "'");
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::filesystem::path> export_traces(const std::vector<RunRecord>& records,
                                                 const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& r : records) {
        const auto path = out_dir / (r.run_id + ".csv");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << "iter,wall_seconds,train_loss,train_mse,logdet,best_train_mse\n";
        double best = std::numeric_limits<double>::infinity();
        for (const auto& row : r.trace) {
            best = std::min(best, row.train_mse);
            out << row.iter << ',' << format_double(row.wall_seconds) << ',' << format_double(row.train_loss) << ','
                << format_double(row.train_mse) << ',' << (row.logdet ? format_double(*row.logdet) : "") << ','
                << format_double(best) << '\n';
        }
        if (!out) throw IoError("write failed for " + path.string());
        written.push_back(path);
    }
    return written;
}

std::vector<TraceCsvRow> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const auto rows = read_csv_rows(in);
    if (rows.empty()) throw DataError(path.string() + " is empty");
    std::vector<TraceCsvRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        if (cells.size() != 6)
            throw ParseError("expected 6 trace columns", static_cast<long>(i + 1), static_cast<long>(cells.size()));
        TraceCsvRow row;
        row.iter = static_cast<int>(parse_double(cells[0]));
        row.wall_seconds = parse_double(cells[1]);
        row.train_loss = parse_double(cells[2]);
        row.train_mse = parse_double(cells[3]);
        if (!cells[4].empty()) row.logdet = parse_double(cells[4]);
        row.best_train_mse = parse_double(cells[5]);
        out.push_back(row);
    }
    return out;
}

}  // namespace anmin
