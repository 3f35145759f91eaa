#include "anmin/csv.hpp"

#include "anmin/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace anmin {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool is_missing(std::string_view cell) {
    cell = trim(cell);
    return cell.empty() || cell == "?" || cell == "NA";
}

bool needs_quotes(std::string_view s) { return s.find_first_of(",\"\r\n") != std::string_view::npos; }

void write_field(std::ostream& out, const std::string& s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) {
        if (ch == '"') out << '"';
        out << ch;
    }
    out << '"';
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_rows(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_quoted = false;
    bool row_has_content = false;
    long line = 1;
    char ch;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content || row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field.empty() || field_quoted)
                    throw ParseError("unexpected quote inside unquoted field", line,
                                     static_cast<long>(row.size()) + 1);
                in_quotes = true;
                field_quoted = true;
                row_has_content = true;
                break;
            case ',':
                end_field();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                ++line;
                break;
            default:
                if (field_quoted)
                    throw ParseError("characters after closing quote", line, static_cast<long>(row.size()) + 1);
                field.push_back(ch);
                row_has_content = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line, static_cast<long>(row.size()) + 1);
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

ColumnKind column_kind_from_string(std::string_view name) {
    if (name == "numeric") return ColumnKind::numeric;
    if (name == "one-hot" || name == "onehot") return ColumnKind::one_hot;
    if (name == "integer") return ColumnKind::integer;
    if (name == "drop") return ColumnKind::drop;
    if (name == "target") return ColumnKind::target;
    throw ConfigError("unknown column kind '" + std::string(name) + "'");
}

ColumnSpec ColumnSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("column spec: ") + e.what());
    }
    ColumnSpec spec;
    if (j.contains("header")) spec.header = j.at("header").get<std::vector<std::string>>();
    if (j.contains("columns"))
        for (const auto& [name, kind] : j.at("columns").items())
            spec.columns[name] = column_kind_from_string(kind.get<std::string>());
    if (j.contains("default")) spec.fallback = column_kind_from_string(j.at("default").get<std::string>());
    return spec;
}

ColumnSpec ColumnSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open column spec " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

ColumnKind ColumnSpec::kind_of(const std::string& column) const {
    const auto it = columns.find(column);
    return it == columns.end() ? fallback : it->second;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not a number: '" + std::string(text) + "'");
    return v;
}

Dataset load_csv_stream(std::istream& in, const CsvLoadOptions& options, CsvLoadReport* report) {
    auto rows = read_csv_rows(in);
    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.spec && options.spec->header) {
        header = *options.spec->header;
    } else {
        if (rows.empty()) throw DataError("CSV has no header row");
        header = rows.front();
        for (auto& h : header) h = std::string(trim(h));
        first_data = 1;
    }
    const std::size_t width = header.size();

    auto index_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw MissingColumn(name);
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<ColumnKind> kinds(width, ColumnKind::numeric);
    for (std::size_t c = 0; c < width; ++c)
        kinds[c] = options.spec ? options.spec->kind_of(header[c]) : ColumnKind::numeric;
    if (options.spec)
        for (const auto& [name, kind] : options.spec->columns) index_of(name);
    for (const auto& name : options.drop) kinds[index_of(name)] = ColumnKind::drop;

    std::vector<std::size_t> target_cols;
    for (const auto& name : options.targets) {
        const auto c = index_of(name);
        kinds[c] = ColumnKind::target;
        target_cols.push_back(c);
    }
    for (std::size_t c = 0; c < width; ++c)
        if (kinds[c] == ColumnKind::target && std::find(target_cols.begin(), target_cols.end(), c) == target_cols.end())
            target_cols.push_back(c);
    if (target_cols.empty()) throw ConfigError("no target column declared");

    // Keep complete rows only.
    std::vector<std::size_t> kept;
    CsvLoadReport local;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        ++local.rows_read;
        if (rows[r].size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(rows[r].size()),
                             static_cast<long>(r) + 1, static_cast<long>(std::min(rows[r].size(), width)) + 1);
        bool missing = false;
        for (std::size_t c = 0; c < width && !missing; ++c)
            missing = kinds[c] != ColumnKind::drop && is_missing(rows[r][c]);
        if (missing)
            ++local.rows_rejected;
        else
            kept.push_back(r);
    }
    if (report) *report = local;
    if (kept.empty()) throw DataError("CSV has no complete data rows");

    // Category levels, sorted, for one-hot and integer columns.
    std::vector<std::vector<std::string>> levels(width);
    for (std::size_t c = 0; c < width; ++c) {
        if (kinds[c] != ColumnKind::one_hot && kinds[c] != ColumnKind::integer) continue;
        std::set<std::string> seen;
        for (auto r : kept) seen.insert(std::string(trim(rows[r][c])));
        levels[c].assign(seen.begin(), seen.end());
    }

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < width; ++c) {
        switch (kinds[c]) {
            case ColumnKind::numeric:
            case ColumnKind::integer: feature_names.push_back(header[c]); break;
            case ColumnKind::one_hot:
                for (const auto& lv : levels[c]) feature_names.push_back(header[c] + "=" + lv);
                break;
            default: break;
        }
    }
    std::vector<std::string> target_names;
    for (auto c : target_cols) target_names.push_back(header[c]);

    const auto n = static_cast<Eigen::Index>(kept.size());
    Matrix features(n, static_cast<Eigen::Index>(feature_names.size()));
    Matrix targets(n, static_cast<Eigen::Index>(target_cols.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto r = kept[static_cast<std::size_t>(i)];
        const auto& cells = rows[r];
        auto numeric = [&](std::size_t c) {
            try {
                return parse_double(cells[c]);
            } catch (const DataError&) {
                throw ParseError("non-numeric value '" + cells[c] + "' in column '" + header[c] + "'",
                                 static_cast<long>(r) + 1, static_cast<long>(c) + 1);
            }
        };
        Eigen::Index f = 0;
        for (std::size_t c = 0; c < width; ++c) {
            switch (kinds[c]) {
                case ColumnKind::numeric: features(i, f++) = numeric(c); break;
                case ColumnKind::integer: {
                    const auto it = std::lower_bound(levels[c].begin(), levels[c].end(), trim(cells[c]));
                    features(i, f++) = static_cast<double>(it - levels[c].begin());
                    break;
                }
                case ColumnKind::one_hot: {
                    const auto v = trim(cells[c]);
                    for (const auto& lv : levels[c]) features(i, f++) = lv == v ? 1.0 : 0.0;
                    break;
                }
                default: break;
            }
        }
        for (std::size_t t = 0; t < target_cols.size(); ++t)
            targets(i, static_cast<Eigen::Index>(t)) = numeric(target_cols[t]);
    }

    Dataset ds = Dataset::from_features(features, std::move(targets), std::move(feature_names),
                                        std::move(target_names));
    ds.validate();
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options, CsvLoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return load_csv_stream(in, options, report);
}

void save_csv_stream(const Dataset& data, std::ostream& out) {
    const Eigen::Index d = data.features();
    const Eigen::Index c = data.outputs();
    auto name = [](const std::vector<std::string>& names, Eigen::Index i, const char* prefix) {
        return static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)]
                                                          : prefix + std::to_string(i);
    };
    bool first = true;
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!first) out << ',';
        write_field(out, name(data.feature_names, j, "x"));
        first = false;
    }
    for (Eigen::Index k = 0; k < c; ++k) {
        if (!first) out << ',';
        write_field(out, name(data.target_names, k, "y"));
        first = false;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) out << (j ? "," : "") << format_double(data.x(i, j + 1));
        for (Eigen::Index k = 0; k < c; ++k) out << (d + k ? "," : "") << format_double(data.y(i, k));
        out << '\n';
    }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    save_csv_stream(data, out);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace anmin
