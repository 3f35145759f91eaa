#include "anmin/campaign.hpp"

#include "anmin/error.hpp"
#include "anmin/image.hpp"
#include "anmin/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#ifndef ANMIN_VERSION
#define ANMIN_VERSION "unknown"
#endif

namespace anmin {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kTrainStream = 0x7261696eULL;
constexpr std::uint64_t kTestStream = 0x74657374ULL;

const char* const kMetrics[] = {"train_mse", "test_mse", "train_r2", "test_r2"};

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::string_view dataset_kind_name(DatasetKind k) {
    switch (k) {
        case DatasetKind::csv: return "csv";
        case DatasetKind::sin: return "sin";
        case DatasetKind::sdf: return "sdf";
        case DatasetKind::dae: return "dae";
    }
    return "csv";
}

DatasetKind dataset_kind_from_string(std::string_view s) {
    if (s == "csv") return DatasetKind::csv;
    if (s == "sin") return DatasetKind::sin;
    if (s == "sdf") return DatasetKind::sdf;
    if (s == "dae") return DatasetKind::dae;
    throw ConfigError("unknown dataset kind '" + std::string(s) + "'");
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw ConfigError("generator option " + key + " expects an integer, got '" + value + "'");
    return v;
}

double safe_r2(const Matrix& pred, const Matrix& y) {
    if (y.rows() < 2) return kNaN;
    try {
        return r_squared_from_predictions(pred, y);
    } catch (const DegenerateTargets&) {
        return kNaN;
    }
}

std::string run_id_for(const std::string& label, std::uint64_t split) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-s%03llu", static_cast<unsigned long long>(split));
    return label + buf;
}

// Train/test pair for split `i`.
std::pair<Dataset, Dataset> materialize(const CampaignConfig& cfg, const Dataset* full, std::uint64_t i) {
    const std::uint64_t seed = cfg.base_seed + i;
    std::pair<Dataset, Dataset> out;
    if (cfg.dataset.has_own_test_set()) {
        const auto& d = cfg.dataset;
        out.first = gen_sin(d.n, d.d, mix_seed(seed, kTrainStream));
        out.second = gen_sin(d.test_n > 0 ? d.test_n : d.n, d.d, mix_seed(seed, kTestStream));
    } else {
        out = split(*full, SplitSpec{cfg.train_fraction, seed, 0});
    }
    if (cfg.standardize) {
        const auto s = Standardizer::fit(out.first);
        out.first = s.apply(out.first);
        out.second = s.apply(out.second);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DatasetSpec

DatasetSpec DatasetSpec::from_json(const json& j) {
    try {
        reject_unknown_keys(j,
                            {"kind", "id", "path", "targets", "drop", "column_spec", "n", "d", "test_n", "normalize",
                             "patch", "stride", "sigma", "noise_seed"},
                            "dataset");
        DatasetSpec s;
        s.kind = dataset_kind_from_string(j.value("kind", std::string("csv")));
        read_opt(j, "id", s.id);
        if (auto it = j.find("path"); it != j.end()) s.path = it->get<std::string>();
        read_opt(j, "targets", s.targets);
        read_opt(j, "drop", s.drop);
        if (auto it = j.find("column_spec"); it != j.end()) s.column_spec = it->get<std::string>();
        read_opt(j, "n", s.n);
        read_opt(j, "d", s.d);
        read_opt(j, "test_n", s.test_n);
        read_opt(j, "normalize", s.normalize);
        read_opt(j, "patch", s.patch.patch);
        read_opt(j, "stride", s.patch.stride);
        read_opt(j, "sigma", s.patch.noise_sigma);
        read_opt(j, "noise_seed", s.noise_seed);
        if (s.kind != DatasetKind::sin && s.path.empty()) throw ConfigError("dataset needs a path");
        if (s.kind == DatasetKind::csv && s.targets.empty() && !s.column_spec)
            throw ConfigError("csv dataset needs targets or a column spec");
        if (s.kind == DatasetKind::sin && (s.n < 1 || s.d < 1 || s.test_n < 0))
            throw ConfigError("sin generator needs n >= 1, d >= 1, test_n >= 0");
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("dataset: ") + e.what());
    }
}

json DatasetSpec::to_json() const {
    json j = {{"kind", std::string(dataset_kind_name(kind))}, {"id", identifier()}};
    switch (kind) {
        case DatasetKind::csv:
            j["path"] = path.string();
            j["targets"] = targets;
            j["drop"] = drop;
            if (column_spec) j["column_spec"] = column_spec->string();
            break;
        case DatasetKind::sin:
            j["n"] = n;
            j["d"] = d;
            j["test_n"] = test_n > 0 ? test_n : n;
            break;
        case DatasetKind::sdf:
            j["path"] = path.string();
            j["normalize"] = normalize;
            break;
        case DatasetKind::dae:
            j["path"] = path.string();
            j["patch"] = patch.patch;
            j["stride"] = patch.stride;
            j["sigma"] = patch.noise_sigma;
            j["noise_seed"] = noise_seed;
            break;
    }
    return j;
}

DatasetSpec DatasetSpec::parse(const std::string& text) {
    const std::string prefix = "generator:";
    DatasetSpec s;
    if (text.rfind(prefix, 0) != 0) {
        s.kind = DatasetKind::csv;
        s.path = text;
        return s;
    }
    const std::string rest = text.substr(prefix.size());
    const auto colon = rest.find(':');
    s.kind = dataset_kind_from_string(rest.substr(0, colon));
    if (s.kind == DatasetKind::csv) throw ConfigError("csv is not a generator");
    if (colon != std::string::npos) {
        for (const auto& kv : split_on(rest.substr(colon + 1), ',')) {
            if (kv.empty()) continue;
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("generator option '" + kv + "' is not key=value");
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            if (key == "n") s.n = parse_int(key, value);
            else if (key == "d") s.d = parse_int(key, value);
            else if (key == "test_n") s.test_n = parse_int(key, value);
            else if (key == "path") s.path = value;
            else if (key == "normalize") s.normalize = value == "1" || value == "true";
            else if (key == "patch") s.patch.patch = static_cast<int>(parse_int(key, value));
            else if (key == "stride") s.patch.stride = static_cast<int>(parse_int(key, value));
            else if (key == "sigma") s.patch.noise_sigma = parse_double(value);
            else if (key == "noise_seed") s.noise_seed = static_cast<std::uint64_t>(parse_int(key, value));
            else if (key == "id") s.id = value;
            else throw ConfigError("unknown generator option '" + key + "'");
        }
    }
    if (s.kind != DatasetKind::sin && s.path.empty()) throw ConfigError("generator needs path=<image>");
    if (s.kind == DatasetKind::sin && (s.n < 1 || s.d < 1 || s.test_n < 0))
        throw ConfigError("sin generator needs n >= 1, d >= 1, test_n >= 0");
    return s;
}

std::string DatasetSpec::identifier() const {
    if (!id.empty()) return id;
    switch (kind) {
        case DatasetKind::sin: return "sin-d" + std::to_string(d) + "-n" + std::to_string(n);
        case DatasetKind::sdf: return "sdf-" + path.stem().string();
        case DatasetKind::dae: return "dae-" + path.stem().string();
        case DatasetKind::csv: break;
    }
    return path.stem().string();
}

Dataset load_dataset(const DatasetSpec& spec) {
    switch (spec.kind) {
        case DatasetKind::csv: {
            CsvLoadOptions opts;
            opts.targets = spec.targets;
            opts.drop = spec.drop;
            if (spec.column_spec) opts.spec = ColumnSpec::from_json_file(*spec.column_spec);
            return load_csv(spec.path, opts);
        }
        case DatasetKind::sin: return gen_sin(spec.n, spec.d, mix_seed(spec.noise_seed, kTrainStream));
        case DatasetKind::sdf: return gen_sdf(read_image(spec.path), spec.normalize);
        case DatasetKind::dae: return gen_dae(read_image(spec.path), spec.patch, spec.noise_seed);
    }
    throw ConfigError("unknown dataset kind");
}

// ---------------------------------------------------------------------------
// MethodConfig

std::string_view to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::anmin: return "anmin";
        case MethodKind::sgd: return "sgd";
        case MethodKind::adam: return "adam";
    }
    return "anmin";
}

MethodKind method_kind_from_string(std::string_view name) {
    if (name == "anmin") return MethodKind::anmin;
    if (name == "sgd") return MethodKind::sgd;
    if (name == "adam") return MethodKind::adam;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected anmin, sgd or adam)");
}

MethodConfig MethodConfig::from_json(const json& j) {
    try {
        reject_unknown_keys(j,
                            {"name", "method", "alpha", "hidden", "lambda", "tau", "iterations", "clamp",
                             "accumulation_batch", "track_min", "degenerate", "lr", "epochs", "batch", "decay_every",
                             "decay_factor", "beta1", "beta2", "eps", "freeze_hidden"},
                            "method");
        MethodConfig m;
        m.kind = method_kind_from_string(j.at("method").get<std::string>());
        m.name = j.value("name", std::string(anmin::to_string(m.kind)));
        read_opt(j, "alpha", m.alpha);
        read_opt(j, "hidden", m.hidden);
        if (m.kind == MethodKind::anmin) {
            read_opt(j, "lambda", m.hp.lambda);
            read_opt(j, "tau", m.hp.tau);
            read_opt(j, "iterations", m.hp.iterations);
            read_opt(j, "clamp", m.hp.clamp);
            read_opt(j, "accumulation_batch", m.hp.accumulation_batch);
            read_opt(j, "track_min", m.ablation.track_min);
            if (auto it = j.find("degenerate"); it != j.end())
                m.ablation.degenerate = degenerate_policy_from_string(it->get<std::string>());
        } else {
            m.gd = m.kind == MethodKind::sgd ? GdConfig::sgd_defaults() : GdConfig::adam_defaults();
            read_opt(j, "lambda", m.gd.lambda);
            read_opt(j, "lr", m.gd.lr0);
            read_opt(j, "epochs", m.gd.epochs);
            read_opt(j, "batch", m.gd.batch);
            read_opt(j, "decay_every", m.gd.decay_every);
            read_opt(j, "decay_factor", m.gd.decay_factor);
            read_opt(j, "beta1", m.gd.adam_beta1);
            read_opt(j, "beta2", m.gd.adam_beta2);
            read_opt(j, "eps", m.gd.adam_eps);
            read_opt(j, "freeze_hidden", m.gd.freeze_hidden);
        }
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("method: ") + e.what());
    }
}

json MethodConfig::to_json() const {
    json j = {{"name", name}, {"method", std::string(anmin::to_string(kind))}, {"alpha", alpha}, {"hidden", hidden}};
    if (kind == MethodKind::anmin) {
        j["lambda"] = hp.lambda;
        j["tau"] = hp.tau;
        j["iterations"] = hp.iterations;
        j["clamp"] = hp.clamp;
        j["accumulation_batch"] = hp.accumulation_batch;
        j["track_min"] = ablation.track_min;
        j["degenerate"] = std::string(anmin::to_string(ablation.degenerate));
    } else {
        j["lambda"] = gd.lambda;
        j["lr"] = gd.lr0;
        j["epochs"] = gd.epochs;
        j["batch"] = gd.batch;
        j["decay_every"] = gd.decay_every;
        j["decay_factor"] = gd.decay_factor;
        if (kind == MethodKind::adam) {
            j["beta1"] = gd.adam_beta1;
            j["beta2"] = gd.adam_beta2;
            j["eps"] = gd.adam_eps;
        }
        j["freeze_hidden"] = gd.freeze_hidden;
    }
    j["init"] = "uniform-fan-in";
    return j;
}

void MethodConfig::validate() const {
    if (name.empty()) throw ConfigError("method name must not be empty");
    if (hidden < 1) throw ConfigError("hidden units must be >= 1");
    static_cast<void>(ActivationConfig(alpha));
    if (kind == MethodKind::anmin) hp.validate();
    else gd.validate();
}

// ---------------------------------------------------------------------------
// CampaignConfig

CampaignConfig CampaignConfig::from_json(const json& j) {
    try {
        reject_unknown_keys(j,
                            {"dataset", "methods", "splits", "base_seed", "output_dir", "workers", "train_fraction",
                             "standardize"},
                            "campaign");
        CampaignConfig c;
        c.dataset = DatasetSpec::from_json(j.at("dataset"));
        for (const auto& m : j.at("methods")) c.methods.push_back(MethodConfig::from_json(m));
        read_opt(j, "splits", c.splits);
        read_opt(j, "base_seed", c.base_seed);
        if (auto it = j.find("output_dir"); it != j.end()) c.output_dir = it->get<std::string>();
        read_opt(j, "workers", c.workers);
        read_opt(j, "train_fraction", c.train_fraction);
        read_opt(j, "standardize", c.standardize);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("campaign: ") + e.what());
    }
}

CampaignConfig CampaignConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

void CampaignConfig::validate() const {
    if (splits < 1) throw ConfigError("splits must be >= 1");
    if (methods.empty()) throw ConfigError("campaign needs at least one method");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    std::set<std::string> names;
    for (const auto& m : methods) {
        m.validate();
        if (!names.insert(m.name).second) throw ConfigError("duplicate method name '" + m.name + "'");
    }
    if (!dataset.has_own_test_set()) SplitSpec{train_fraction, 0, 0}.validate();
}

// ---------------------------------------------------------------------------
// Runs

RunRecord run_single(const Dataset& train_set, const Dataset& test_set, const MethodConfig& method, std::uint64_t seed,
                     std::uint64_t split_index, const std::string& dataset_id) {
    RunRecord rec;
    rec.run_id = run_id_for(method.name, split_index);
    rec.dataset_id = dataset_id;
    rec.method = std::string(to_string(method.kind));
    rec.label = method.name;
    rec.alpha = method.alpha;
    rec.hyperparameters = method.to_json();
    rec.seed = seed;
    rec.split_index = split_index;
    rec.code_version = ANMIN_VERSION;
    rec.started_at = utc_timestamp();
    rec.train_mse = rec.test_mse = rec.train_r2 = rec.test_r2 = kNaN;

    try {
        const ActivationConfig act(method.alpha);
        NetworkParams params;
        if (method.kind == MethodKind::anmin) {
            auto result = train(train_set, act, method.hp, method.ablation, method.hidden, seed);
            for (const auto& it : result.trace.iterations)
                rec.trace.push_back({it.iteration, it.train_loss, it.train_mse, it.logdet, it.wall_seconds,
                                     it.iteration == 0 ? std::string{} : std::string(to_string(it.path))});
            rec.hyperparameters["best_iteration"] = result.trace.best_iteration;
            rec.hyperparameters["stopped_early"] = result.trace.stopped_early;
            params = std::move(result.params);
        } else {
            GdConfig cfg = method.gd;
            cfg.optimizer = method.kind == MethodKind::sgd ? Optimizer::sgd : Optimizer::adam;
            auto result = train_gd(train_set, act, cfg, method.hidden, seed);
            for (const auto& e : result.trace)
                rec.trace.push_back({e.epoch, e.train_loss, e.train_mse, std::nullopt, e.wall_seconds, {}});
            if (result.diverged) throw NumericalError("training diverged");
            params = std::move(result.params);
        }
        const Matrix train_pred = forward(params, act, train_set.x);
        const Matrix test_pred = forward(params, act, test_set.x);
        rec.train_mse = mse_from_predictions(train_pred, train_set.y);
        rec.test_mse = mse_from_predictions(test_pred, test_set.y);
        rec.train_r2 = safe_r2(train_pred, train_set.y);
        rec.test_r2 = safe_r2(test_pred, test_set.y);
        if (!std::isfinite(rec.train_mse) || !std::isfinite(rec.test_mse))
            throw NumericalError("non-finite final MSE");
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.train_mse = rec.test_mse = rec.train_r2 = rec.test_r2 = kNaN;
    }
    rec.finished_at = utc_timestamp();
    return rec;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) {
        auto& g = groups[r.label];
        if (g.empty()) order.push_back(r.label);
        g.push_back(&r);
    }
    std::vector<SummaryRow> rows;
    for (const auto& label : order) {
        const auto& g = groups[label];
        std::size_t failures = 0;
        for (const auto* r : g) failures += r->failed ? 1 : 0;
        for (const char* metric : kMetrics) {
            std::vector<double> values;
            for (const auto* r : g) {
                if (r->failed) continue;
                const double v = metric_value(*r, metric);
                if (!std::isnan(v)) values.push_back(v);
            }
            SummaryRow row;
            row.label = label;
            row.method = g.front()->method;
            row.metric = metric;
            row.failures = failures;
            if (values.empty()) {
                row.mean = row.std = kNaN;
            } else {
                const auto ms = mean_std(values);
                row.mean = ms.mean;
                row.std = ms.std;
                row.n = ms.n;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "label,method,metric,mean,std,n,failures\n";
    for (const auto& r : rows)
        out << r.label << ',' << r.method << ',' << r.metric << ',' << (std::isnan(r.mean) ? "" : format_double(r.mean))
            << ',' << (std::isnan(r.std) ? "" : format_double(r.std)) << ',' << r.n << ',' << r.failures << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

int effective_workers(int configured) {
    if (const char* env = std::getenv("ANMIN_WORKERS"); env && *env) {
        int v = 0;
        const std::string_view s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
            throw ConfigError("ANMIN_WORKERS must be a positive integer, got '" + std::string(s) + "'");
        return v;
    }
    return std::max(1, configured);
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
    cfg.validate();
    const int workers = effective_workers(cfg.workers);
    const auto record_dir = cfg.output_dir / "records";
    std::error_code ec;
    std::filesystem::create_directories(record_dir, ec);
    if (ec) throw IoError("cannot create " + record_dir.string() + ": " + ec.message());

    std::optional<Dataset> full;
    if (!cfg.dataset.has_own_test_set()) full = load_dataset(cfg.dataset);
    const std::string dataset_id = cfg.dataset.identifier();

    const auto n_splits = static_cast<std::size_t>(cfg.splits);
    std::vector<std::pair<Dataset, Dataset>> data(n_splits);
    for (std::size_t i = 0; i < n_splits; ++i) data[i] = materialize(cfg, full ? &*full : nullptr, i);

    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_tasks = n_splits * n_methods;
    std::vector<std::filesystem::path> files(n_tasks);
    std::vector<std::string> io_errors(n_tasks);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) {
            const std::size_t i = t / n_methods;
            const auto& method = cfg.methods[t % n_methods];
            const auto rec = run_single(data[i].first, data[i].second, method, cfg.base_seed + i, i, dataset_id);
            files[t] = record_dir / (rec.run_id + ".jsonl");
            try {
                write_records({rec}, files[t]);
            } catch (const std::exception& e) {
                io_errors[t] = e.what();
            }
        }
    };
    const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n_tasks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : io_errors)
        if (!e.empty()) throw IoError(e);

    // Aggregate from the files on disk, in task order.
    CampaignResult result;
    result.record_files = files;
    for (const auto& f : files) {
        auto part = read_records(f);
        result.records.insert(result.records.end(), part.begin(), part.end());
    }
    result.summary = summarize(result.records);
    write_summary_csv(result.summary, cfg.output_dir / "summary.csv");
    return result;
}

PairedTTest compare(const std::vector<RunRecord>& records, const std::string& a, const std::string& b,
                    const std::string& metric) {
    if (!is_metric_name(metric)) throw ConfigError("unknown metric '" + metric + "'");
    std::map<std::uint64_t, const RunRecord*> ra, rb;
    for (const auto& r : records) {
        if (r.label == a) ra[r.split_index] = &r;
        if (r.label == b) rb[r.split_index] = &r;
    }
    if (ra.empty()) throw UnpairedRuns("no runs labelled '" + a + "'");
    if (rb.empty()) throw UnpairedRuns("no runs labelled '" + b + "'");
    std::vector<double> va, vb;
    for (const auto& [split, rec] : ra) {
        const auto it = rb.find(split);
        if (it == rb.end()) throw UnpairedRuns("split " + std::to_string(split) + " missing for '" + b + "'");
        const double x = metric_value(*rec, metric);
        const double y = metric_value(*it->second, metric);
        if (rec->failed || it->second->failed || std::isnan(x) || std::isnan(y)) continue;
        va.push_back(x);
        vb.push_back(y);
    }
    if (rb.size() != ra.size()) throw UnpairedRuns("'" + a + "' and '" + b + "' cover different splits");
    return paired_t_test(va, vb);
}

}  // namespace anmin
