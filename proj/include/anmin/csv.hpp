#pragma once

#include "anmin/model.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anmin {

/// RFC-4180 reader: comma separated, double-quoted fields with "" escapes,
/// LF or CRLF line ends. Returns rows of raw cells.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in);

enum class ColumnKind { numeric, one_hot, integer, drop, target };

ColumnKind column_kind_from_string(std::string_view name);

/// Sidecar column description, read from JSON:
///   { "header": [...names for a headerless file...],
///     "columns": { "<name>": "numeric" | "one-hot" | "integer" | "drop" | "target" },
///     "default": "numeric" }
struct ColumnSpec {
    std::optional<std::vector<std::string>> header;
    std::map<std::string, ColumnKind> columns;
    ColumnKind fallback = ColumnKind::numeric;

    static ColumnSpec from_json_file(const std::filesystem::path& path);
    static ColumnSpec from_json_text(const std::string& text);
    ColumnKind kind_of(const std::string& column) const;
};

struct CsvLoadOptions {
    std::vector<std::string> targets;
    std::vector<std::string> drop;
    std::optional<ColumnSpec> spec;
};

struct CsvLoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_rejected = 0;  // rows with an empty, "?" or "NA" cell
};

Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options, CsvLoadReport* report = nullptr);
Dataset load_csv_stream(std::istream& in, const CsvLoadOptions& options, CsvLoadReport* report = nullptr);

/// Writes features then targets under the dataset's column names, using the
/// shortest representation that parses back to the same double.
void save_csv(const Dataset& data, const std::filesystem::path& path);
void save_csv_stream(const Dataset& data, std::ostream& out);

std::string format_double(double v);
double parse_double(std::string_view text);  // throws DataError on malformed input

}  // namespace anmin
