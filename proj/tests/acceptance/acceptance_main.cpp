// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   anmin_acceptance                 synthetic criteria (3-8, 10, 11)
//   anmin_acceptance -c 1 -c 9       selected criteria
//   anmin_acceptance --data-dir DIR  where abalone.data / hour.csv live
//                                    (default: $ANMIN_DATA_DIR, then ./data);
//                                    column sidecars fall back to the repo data/

#include "anmin/baseline_gd.hpp"
#include "anmin/campaign.hpp"
#include "anmin/error.hpp"
#include "anmin/layer_solvers.hpp"
#include "oracles.hpp"

#include "CLI11.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace anmin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "anmin-acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct Instance {
    Dataset data;
    NetworkParams params;
    FiringPattern pattern;
};

Instance make_instance(std::uint64_t seed, Eigen::Index n, Eigen::Index d, Eigen::Index h, Eigen::Index c,
                       double alpha) {
    std::mt19937_64 rng(seed);
    Instance in{oracle::random_dataset(rng, n, d, c), oracle::random_params(rng, d, h, c), {}};
    in.pattern = compute_pattern(in.data.x, in.params.hidden, ActivationConfig(alpha));
    return in;
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

MethodConfig anmin_method(const std::string& name, bool track_min = true,
                          DegeneratePolicy policy = DegeneratePolicy::pseudo_solve) {
    MethodConfig m;
    m.name = name;
    m.kind = MethodKind::anmin;
    m.hidden = 64;
    m.alpha = 0.0;
    m.ablation = {track_min, policy};
    return m;
}

MethodConfig gd_method(const std::string& name, MethodKind kind) {
    MethodConfig m;
    m.name = name;
    m.kind = kind;
    m.hidden = 64;
    m.gd = kind == MethodKind::sgd ? GdConfig::sgd_defaults() : GdConfig::adam_defaults();
    return m;
}

const SummaryRow& summary_row(const std::vector<SummaryRow>& rows, const std::string& label,
                              const std::string& metric) {
    for (const auto& r : rows)
        if (r.label == label && r.metric == metric) return r;
    throw DataError("no summary row for " + label + "/" + metric);
}

std::optional<DatasetSpec> real_dataset(const fs::path& dir, const std::string& file, const std::string& sidecar,
                                        std::string& missing) {
    const auto path = dir / file;
    auto spec_path = dir / sidecar;
    if (!fs::exists(spec_path)) spec_path = fs::path(ANMIN_REPO_DATA_DIR) / sidecar;
    if (!fs::exists(path)) {
        missing = path.string() + " not found";
        return std::nullopt;
    }
    if (!fs::exists(spec_path)) {
        missing = spec_path.string() + " not found";
        return std::nullopt;
    }
    DatasetSpec s;
    s.kind = DatasetKind::csv;
    s.path = path;
    s.column_spec = spec_path;
    s.id = fs::path(file).stem().string();
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- real-data criteria ---------------------------------------------------

Outcome abalone(const fs::path& data_dir) {
    std::string missing;
    const auto spec = real_dataset(data_dir, "abalone.data", "abalone.columns.json", missing);
    if (!spec) return {false, missing};
    CampaignConfig c;
    c.dataset = *spec;
    c.methods = {anmin_method("anmin")};
    c.splits = 20;
    c.output_dir = scratch_dir("abalone");
    c.workers = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_campaign(c);
    const double secs = seconds_since(t0);
    const double tr = summary_row(res.summary, "anmin", "train_mse").mean;
    const double te = summary_row(res.summary, "anmin", "test_mse").mean;
    const double r2 = summary_row(res.summary, "anmin", "train_r2").mean;
    const bool ok = tr >= 3.75 && tr <= 4.15 && te >= 4.1 && te <= 5.3 && r2 >= 0.60 && r2 <= 0.64 && secs < 180.0;
    return {ok, "mean train MSE " + fmt("%.4f", tr) + " in [3.75, 4.15], mean test MSE " + fmt("%.4f", te) +
                    " in [4.1, 5.3], mean train R2 " + fmt("%.4f", r2) + " in [0.60, 0.64], " + fmt("%.1f", secs) +
                    " s < 180 s"};
}

Outcome bike(const fs::path& data_dir) {
    std::string missing;
    const auto spec = real_dataset(data_dir, "hour.csv", "hour.columns.json", missing);
    if (!spec) return {false, missing};
    CampaignConfig c;
    c.dataset = *spec;
    c.methods = {anmin_method("anmin")};
    c.splits = 20;
    c.output_dir = scratch_dir("bike");
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_campaign(c);
    const double secs = seconds_since(t0);
    const double tr = summary_row(res.summary, "anmin", "train_mse").mean;
    const bool ok = tr >= 1100.0 && tr <= 2200.0 && secs < 600.0;
    return {ok, "mean train MSE " + fmt("%.1f", tr) + " in [1100, 2200], " + fmt("%.1f", secs) + " s < 600 s"};
}

Outcome ablation(const fs::path& data_dir) {
    std::string missing;
    const auto spec = real_dataset(data_dir, "hour.csv", "hour.columns.json", missing);
    if (!spec) return {false, missing};
    CampaignConfig c;
    c.dataset = *spec;
    c.methods = {anmin_method("exp1", false, DegeneratePolicy::stop),
                 anmin_method("exp2", true, DegeneratePolicy::random_restart),
                 anmin_method("exp3", false, DegeneratePolicy::pseudo_solve),
                 anmin_method("exp4", true, DegeneratePolicy::pseudo_solve)};
    c.splits = 10;
    c.output_dir = scratch_dir("ablation");
    const auto res = run_campaign(c);
    double m[5] = {};
    for (int e = 1; e <= 4; ++e) m[e] = summary_row(res.summary, "exp" + std::to_string(e), "train_mse").mean;
    const bool ok = m[4] * 2.0 <= m[1];
    return {ok, "train MSE exp1 " + fmt("%.1f", m[1]) + ", exp2 " + fmt("%.1f", m[2]) + ", exp3 " +
                    fmt("%.1f", m[3]) + ", exp4 " + fmt("%.1f", m[4]) + "; need exp1/exp4 >= 2, got " +
                    fmt("%.3f", m[1] / m[4]) + (m[4] <= m[2] ? "; exp4<=exp2" : "; exp4>exp2") +
                    (m[4] <= m[3] ? "; exp4<=exp3" : "; exp4>exp3")};
}

// --- synthetic criteria ---------------------------------------------------

Outcome simulation_dominance() {
    CampaignConfig c;
    c.dataset.kind = DatasetKind::sin;
    c.dataset.id = "sin-d3";
    c.dataset.n = 1000;
    c.dataset.d = 3;
    c.methods = {anmin_method("anmin"), gd_method("adam", MethodKind::adam)};
    c.splits = 20;
    c.output_dir = scratch_dir("simulation");
    const auto res = run_campaign(c);
    std::map<std::uint64_t, double> anmin_test, adam_test;
    for (const auto& r : res.records) (r.label == "anmin" ? anmin_test : adam_test)[r.split_index] = r.test_mse;
    int wins = 0;
    for (const auto& [split, v] : anmin_test)
        if (v < adam_test.at(split)) ++wins;
    const bool ok = wins * 10 >= 7 * static_cast<int>(anmin_test.size());
    return {ok, "ANMIN test MSE below Adam in " + std::to_string(wins) + "/" + std::to_string(anmin_test.size()) +
                    " seeds (need >= 70%); mean test MSE ANMIN " +
                    fmt("%.4f", summary_row(res.summary, "anmin", "test_mse").mean) + ", Adam " +
                    fmt("%.4f", summary_row(res.summary, "adam", "test_mse").mean)};
}

Outcome critical_point() {
    const double lambda = 0.001;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto in = make_instance(1000 + seed, 200, 5, 8, 2, 0.0);
        const auto sys = assemble_system(accumulate_gram(in.data.x, in.pattern, 256), in.params.output,
                                         in.params.bias, in.data.y, in.data.x, in.pattern, lambda);
        const auto out = solve_hidden_layer(sys, -10000.0);
        if (out.path != SolverPath::direct) return {false, "instance " + std::to_string(seed) + " not solved directly"};
        auto f = [&](const Matrix& a) {
            return oracle::frozen_loss(a, in.params.output, in.params.bias, in.pattern.blend, in.data.x, in.data.y,
                                       lambda);
        };
        const double at_solution = oracle::fd_gradient(f, out.hidden, 1e-5).norm();
        const double at_start = oracle::fd_gradient(f, in.params.hidden, 1e-5).norm();
        worst = std::max(worst, at_solution / at_start);
    }
    return {worst <= 1e-4, "max relative FD gradient " + fmt("%.3e", worst) + " <= 1e-4 over 20 instances"};
}

Outcome output_optimality() {
    const double lambda = 0.001;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double alpha = seed % 2 ? 0.0 : 0.1;
        auto in = make_instance(2000 + seed, 100, 4, 6, 2, alpha);
        const ActivationConfig act(alpha);
        const auto fit = fit_output_layer(hidden_features(in.data.x, in.params.hidden, act), in.data.y, lambda);
        in.params.output = fit.weights;
        in.params.bias = fit.bias;
        auto f_out = [&](const Matrix& b) {
            return oracle::naive_loss({in.params.hidden, b, in.params.bias}, alpha, in.data.x, in.data.y, lambda);
        };
        auto f_bias = [&](const Matrix& b0) {
            return oracle::naive_loss({in.params.hidden, in.params.output, Vector(b0)}, alpha, in.data.x, in.data.y,
                                      lambda);
        };
        const Matrix gb = oracle::fd_gradient(f_out, in.params.output, 1e-6);
        const Matrix gc = oracle::fd_gradient(f_bias, Matrix(in.params.bias), 1e-6);
        // Scale: the same gradient at (B, b0) = 0.
        const Matrix zero_b = Matrix::Zero(in.params.output.rows(), in.params.output.cols());
        NetworkParams origin{in.params.hidden, zero_b, Vector::Zero(in.params.bias.size())};
        auto f0_out = [&](const Matrix& b) {
            return oracle::naive_loss({origin.hidden, b, origin.bias}, alpha, in.data.x, in.data.y, lambda);
        };
        auto f0_bias = [&](const Matrix& b0) {
            return oracle::naive_loss({origin.hidden, origin.output, Vector(b0)}, alpha, in.data.x, in.data.y, lambda);
        };
        const double scale = std::hypot(oracle::fd_gradient(f0_out, origin.output, 1e-6).norm(),
                                        oracle::fd_gradient(f0_bias, Matrix(origin.bias), 1e-6).norm());
        worst = std::max(worst, std::hypot(gb.norm(), gc.norm()) / scale);
    }
    return {worst <= 1e-6, "max relative FD gradient " + fmt("%.3e", worst) + " <= 1e-6 over 20 instances"};
}

Outcome oracle_equivalence() {
    const double lambda = 0.001;
    double worst_m = 0.0, worst_rhs = 0.0, worst_batch = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto in = make_instance(3000 + seed, 50, 3, 4, 2, seed % 2 ? 0.0 : 0.1);
        const auto ref = accumulate_gram(in.data.x, in.pattern, 50);
        const auto sys = assemble_system(accumulate_gram(in.data.x, in.pattern, 16), in.params.output,
                                         in.params.bias, in.data.y, in.data.x, in.pattern, lambda);
        const auto naive =
            oracle::naive_system(in.data.x, in.pattern.blend, in.params.output, in.params.bias, in.data.y, lambda);
        worst_m = std::max(worst_m, rel(sys.m, naive.m));
        worst_rhs = std::max(worst_rhs, rel(sys.rhs, naive.rhs));
        for (int batch : {1, 3, 7, 16, 49, 256})
            worst_batch = std::max(worst_batch, rel(accumulate_gram(in.data.x, in.pattern, batch).full(), ref.full()));
    }
    const bool ok = worst_m <= 1e-11 && worst_rhs <= 1e-11 && worst_batch <= 1e-12;
    return {ok, "M rel " + fmt("%.2e", worst_m) + ", rhs rel " + fmt("%.2e", worst_rhs) + " (<= 1e-11); batch rel " +
                    fmt("%.2e", worst_batch) + " (<= 1e-12)"};
}

Outcome quadratic_identity() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double alpha = seed % 3 == 0 ? 0.2 : 0.0;
        const double lambda = 0.001;
        const Eigen::Index n = 60, d = 3, h = 5;
        const auto in = make_instance(4000 + seed, n, d, h, 2, alpha);
        const auto sys = assemble_system(accumulate_gram(in.data.x, in.pattern, 256), in.params.output,
                                         in.params.bias, in.data.y, in.data.x, in.pattern, lambda);
        std::mt19937_64 rng(seed);
        const Matrix a = oracle::random_matrix(rng, d + 1, h);
        const Vector av = unravel(a);
        Matrix resid = in.data.y;
        resid.rowwise() -= in.params.bias.transpose();
        const double quad = av.dot(sys.m * av) - 2.0 * sys.rhs.dot(av) + resid.squaredNorm() / double(n) +
                            lambda * (in.params.bias.squaredNorm() + in.params.output.squaredNorm());
        const double direct = oracle::frozen_loss(a, in.params.output, in.params.bias, in.pattern.blend, in.data.x,
                                                  in.data.y, lambda);
        worst = std::max(worst, std::abs(quad - direct) / std::abs(direct));
    }
    return {worst <= 1e-9, "max relative disagreement " + fmt("%.2e", worst) + " <= 1e-9 over 20 instances"};
}

Outcome psd() {
    double worst = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const double alpha = seed % 2 ? 0.0 : 0.1;
        // Small N relative to (d+1)h makes many instances rank deficient.
        const Eigen::Index n = seed % 3 == 0 ? 10 : 80;
        const auto in = make_instance(5000 + seed, n, 4, 6, 2, alpha);
        const auto sys = assemble_system(accumulate_gram(in.data.x, in.pattern, 256), in.params.output,
                                         in.params.bias, in.data.y, in.data.x, in.pattern, 0.0);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sys.m, Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff() / sys.m.norm());
        ++count;
    }
    return {worst <= 1e-8, "max(-min eigenvalue / ||M||_F) " + fmt("%.2e", worst) + " <= 1e-8 over " +
                               std::to_string(count) + " instances"};
}

Outcome baseline_gradients() {
    int checked = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; checked < 20 && seed < 1000; ++seed) {
        std::mt19937_64 rng(6000 + seed);
        const auto d = oracle::random_dataset(rng, 15, 3, 2);
        const auto p = oracle::random_params(rng, 3, 4, 2);
        if ((d.x * p.hidden).cwiseAbs().minCoeff() < 1e-3) continue;  // too near a kink
        ++checked;
        const double alpha = seed % 2 ? 0.0 : 0.1;
        const double lambda = 0.01;
        const auto g = gradients(p, ActivationConfig(alpha), d.x, d.y, lambda);
        auto fa = [&](const Matrix& a) { return oracle::naive_loss({a, p.output, p.bias}, alpha, d.x, d.y, lambda); };
        auto fb = [&](const Matrix& b) { return oracle::naive_loss({p.hidden, b, p.bias}, alpha, d.x, d.y, lambda); };
        auto fc = [&](const Matrix& c) {
            return oracle::naive_loss({p.hidden, p.output, Vector(c)}, alpha, d.x, d.y, lambda);
        };
        const Matrix ga = oracle::fd_gradient(fa, p.hidden, 1e-6);
        const Matrix gb = oracle::fd_gradient(fb, p.output, 1e-6);
        const Matrix gc = oracle::fd_gradient(fc, Matrix(p.bias), 1e-6);
        worst = std::max({worst, rel(g.hidden, ga), rel(g.output, gb), rel(Matrix(g.bias), gc)});
    }
    return {checked == 20 && worst <= 1e-6,
            "max relative gradient error " + fmt("%.2e", worst) + " <= 1e-6 over " + std::to_string(checked) +
                " instances"};
}

Outcome determinism() {
    auto config = [](const std::string& dir) {
        CampaignConfig c;
        c.dataset.kind = DatasetKind::sin;
        c.dataset.n = 300;
        c.dataset.d = 3;
        c.methods = {anmin_method("anmin"), gd_method("adam", MethodKind::adam), gd_method("sgd", MethodKind::sgd)};
        for (auto& m : c.methods) {
            m.hidden = 16;
            m.gd.epochs = 40;
        }
        c.splits = 3;
        c.workers = 2;
        c.output_dir = scratch_dir(dir);
        return c;
    };
    const auto a = run_campaign(config("determinism-a"));
    const auto b = run_campaign(config("determinism-b"));
    if (a.summary.size() != b.summary.size()) return {false, "summary sizes differ"};
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < a.summary.size(); ++i) {
        const auto& x = a.summary[i];
        const auto& y = b.summary[i];
        const bool same = x.label == y.label && x.metric == y.metric && x.n == y.n &&
                          std::memcmp(&x.mean, &y.mean, sizeof(double)) == 0 &&
                          std::memcmp(&x.std, &y.std, sizeof(double)) == 0;
        if (!same) ++mismatches;
    }
    return {mismatches == 0, std::to_string(a.summary.size() - mismatches) + "/" + std::to_string(a.summary.size()) +
                                 " summary numbers bit-identical across reruns"};
}

struct Criterion {
    int id;
    const char* name;
    bool needs_data;
    std::function<Outcome(const fs::path&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANMIN acceptance checks"};
    std::vector<int> selected;
    std::string data_dir;
    app.add_option("-c,--criterion", selected, "criterion number (repeatable)")->check(CLI::Range(1, 11));
    app.add_option("--data-dir", data_dir, "directory holding abalone.data and hour.csv");
    CLI11_PARSE(app, argc, argv);

    if (data_dir.empty()) {
        const char* env = std::getenv("ANMIN_DATA_DIR");
        data_dir = env && *env ? env : "data";
    }

    const std::vector<Criterion> all = {
        {1, "abalone reproduction", true, abalone},
        {2, "bike-sharing reproduction", true, bike},
        {3, "simulation dominance", false, [](const fs::path&) { return simulation_dominance(); }},
        {4, "critical-point property", false, [](const fs::path&) { return critical_point(); }},
        {5, "output-layer optimality", false, [](const fs::path&) { return output_optimality(); }},
        {6, "oracle equivalence", false, [](const fs::path&) { return oracle_equivalence(); }},
        {7, "quadratic identity", false, [](const fs::path&) { return quadratic_identity(); }},
        {8, "M positive semidefinite", false, [](const fs::path&) { return psd(); }},
        {9, "ablation ordering", true, ablation},
        {10, "baseline gradient check", false, [](const fs::path&) { return baseline_gradients(); }},
        {11, "campaign determinism", false, [](const fs::path&) { return determinism(); }},
    };

    int failures = 0;
    for (const auto& c : all) {
        const bool wanted = selected.empty() ? !c.needs_data
                                             : std::find(selected.begin(), selected.end(), c.id) != selected.end();
        if (!wanted) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run(data_dir);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
