#include "anmin/campaign.hpp"
#include "anmin/csv.hpp"
#include "anmin/datasets.hpp"
#include "anmin/error.hpp"
#include "anmin/image.hpp"
#include "anmin/records.hpp"
#include "anmin/stats.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

void print_summary(const std::vector<anmin::SummaryRow>& rows) {
    std::printf("%-16s %-10s %16s %14s %4s %8s\n", "label", "metric", "mean", "std", "n", "failures");
    for (const auto& r : rows)
        std::printf("%-16s %-10s %16.6g %14.6g %4zu %8zu\n", r.label.c_str(), r.metric.c_str(), r.mean, r.std, r.n,
                    r.failures);
}

struct TrainArgs {
    std::string dataset;
    std::vector<std::string> targets;
    std::vector<std::string> drop;
    std::string column_spec;
    std::string method = "anmin";
    double alpha = 0.0;
    long hidden = 64;
    std::optional<double> lambda;
    std::optional<double> tau;
    std::optional<int> iters;
    std::optional<double> lr;
    std::optional<int> batch;
    std::string degenerate = "pseudo_solve";
    bool final_model = false;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;
    bool standardize = false;
    std::string out = "anmin-out";
};

int cmd_train(const TrainArgs& a) {
    anmin::CampaignConfig cfg;
    cfg.dataset = anmin::DatasetSpec::parse(a.dataset);
    if (cfg.dataset.kind == anmin::DatasetKind::csv) {
        cfg.dataset.targets = a.targets;
        cfg.dataset.drop = a.drop;
        if (!a.column_spec.empty()) cfg.dataset.column_spec = a.column_spec;
        if (a.targets.empty() && a.column_spec.empty())
            throw anmin::ConfigError("CSV datasets need --target or --column-spec");
    }
    anmin::MethodConfig m;
    m.kind = anmin::method_kind_from_string(a.method);
    m.name = a.method;
    m.alpha = a.alpha;
    m.hidden = a.hidden;
    if (m.kind == anmin::MethodKind::anmin) {
        if (a.lambda) m.hp.lambda = *a.lambda;
        if (a.tau) m.hp.tau = *a.tau;
        if (a.iters) m.hp.iterations = *a.iters;
        if (a.batch) m.hp.accumulation_batch = *a.batch;
        m.ablation.track_min = !a.final_model;
        m.ablation.degenerate = anmin::degenerate_policy_from_string(a.degenerate);
    } else {
        m.gd = m.kind == anmin::MethodKind::sgd ? anmin::GdConfig::sgd_defaults() : anmin::GdConfig::adam_defaults();
        if (a.lambda) m.gd.lambda = *a.lambda;
        if (a.iters) m.gd.epochs = *a.iters;
        if (a.lr) m.gd.lr0 = *a.lr;
        if (a.batch) m.gd.batch = *a.batch;
    }
    cfg.methods = {m};
    cfg.splits = 1;
    cfg.base_seed = a.seed;
    cfg.output_dir = a.out;
    cfg.train_fraction = a.train_fraction;
    cfg.standardize = a.standardize;

    const auto result = anmin::run_campaign(cfg);
    const auto& rec = result.records.front();
    if (rec.failed) {
        std::fprintf(stderr, "run %s failed: %s\n", rec.run_id.c_str(), rec.error.c_str());
        return static_cast<int>(anmin::ErrorKind::numerical);
    }
    std::printf("run %s: train MSE %.6g, test MSE %.6g, train R2 %.4f, test R2 %.4f\n", rec.run_id.c_str(),
                rec.train_mse, rec.test_mse, rec.train_r2, rec.test_r2);
    std::printf("record: %s\n", result.record_files.front().string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-layer leaky-ReLU regression by alternating analytic minimization"};
    app.set_version_flag("--version", std::string(ANMIN_VERSION));
    app.require_subcommand(1);

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Train one model on one train/test split");
    train->add_option("--dataset", ta.dataset, "CSV path or generator:<sin|sdf|dae>:key=value,...")->required();
    train->add_option("--target", ta.targets, "Target column (repeatable)");
    train->add_option("--drop", ta.drop, "Column to ignore (repeatable)");
    train->add_option("--column-spec", ta.column_spec, "JSON column description");
    train->add_option("--method", ta.method, "anmin, sgd or adam")->capture_default_str();
    train->add_option("--alpha", ta.alpha, "Leaky-ReLU slope")->capture_default_str();
    train->add_option("--hidden", ta.hidden, "Hidden units")->capture_default_str();
    train->add_option("--lambda", ta.lambda, "Shrinkage (ANMIN default 0.001, GD default 0)");
    train->add_option("--tau", ta.tau, "Log-determinant threshold (default -10000)");
    train->add_option("--iters", ta.iters, "ANMIN iterations or GD epochs");
    train->add_option("--lr", ta.lr, "Initial learning rate for sgd/adam");
    train->add_option("--batch", ta.batch, "Minibatch size (GD) or accumulation batch (ANMIN)");
    train->add_option("--degenerate", ta.degenerate, "pseudo_solve, random_restart or stop")->capture_default_str();
    train->add_flag("--final-model", ta.final_model, "Report the last iterate instead of the best");
    train->add_option("--seed", ta.seed, "Split and initialization seed")->capture_default_str();
    train->add_option("--train-fraction", ta.train_fraction)->capture_default_str();
    train->add_flag("--standardize", ta.standardize, "Z-score features with training statistics");
    train->add_option("--out", ta.out, "Output directory")->capture_default_str();

    std::string config_path;
    auto* campaign = app.add_subcommand("campaign", "Run every method on every split of a JSON campaign");
    campaign->add_option("--config", config_path, "Campaign JSON")->required()->check(CLI::ExistingFile);

    auto* gen = app.add_subcommand("gen-data", "Write a generated dataset as CSV");
    gen->require_subcommand(1);
    std::string gen_out;
    long sin_n = 1000, sin_d = 3;
    std::uint64_t gen_seed = 0;
    std::string mask_path, image_path;
    bool normalize = false;
    anmin::PatchConfig patch;
    auto* gen_sin_cmd = gen->add_subcommand("sin", "x ~ N(0, I), y = sin(|x|^2)");
    gen_sin_cmd->add_option("--n", sin_n)->capture_default_str();
    gen_sin_cmd->add_option("--d", sin_d)->capture_default_str();
    gen_sin_cmd->add_option("--seed", gen_seed)->capture_default_str();
    gen_sin_cmd->add_option("--out", gen_out)->required();
    auto* gen_sdf_cmd = gen->add_subcommand("sdf", "Signed distance to a binary mask");
    gen_sdf_cmd->add_option("--mask", mask_path, "PGM or PNG, values 0/255")->required()->check(CLI::ExistingFile);
    gen_sdf_cmd->add_flag("--normalize", normalize, "Scale coordinates into [0, 1]");
    gen_sdf_cmd->add_option("--out", gen_out)->required();
    auto* gen_dae_cmd = gen->add_subcommand("dae", "Noisy/clean patch pairs from an image");
    gen_dae_cmd->add_option("--image", image_path)->required()->check(CLI::ExistingFile);
    gen_dae_cmd->add_option("--patch", patch.patch)->capture_default_str();
    gen_dae_cmd->add_option("--stride", patch.stride)->capture_default_str();
    gen_dae_cmd->add_option("--sigma", patch.noise_sigma)->capture_default_str();
    gen_dae_cmd->add_option("--seed", gen_seed)->capture_default_str();
    gen_dae_cmd->add_option("--out", gen_out)->required();

    std::string records_dir, label_a, label_b, metric = "test_mse";
    auto* cmp = app.add_subcommand("compare", "Paired t-test between two methods of a campaign");
    cmp->add_option("--records", records_dir, "Directory of .jsonl run records")->required();
    cmp->add_option("--a", label_a)->required();
    cmp->add_option("--b", label_b)->required();
    cmp->add_option("--metric", metric)
        ->check(CLI::IsMember({"train_mse", "test_mse", "train_r2", "test_r2"}))
        ->capture_default_str();

    std::string export_out;
    auto* exp = app.add_subcommand("export-traces", "Per-run trace CSVs for plotting");
    exp->add_option("--records", records_dir, "Directory of .jsonl run records")->required();
    exp->add_option("--out", export_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(anmin::ErrorKind::config);
    }

    try {
        if (*train) return cmd_train(ta);
        if (*campaign) {
            const auto cfg = anmin::CampaignConfig::from_json_file(config_path);
            const auto result = anmin::run_campaign(cfg);
            print_summary(result.summary);
            std::printf("summary: %s\n", (cfg.output_dir / "summary.csv").string().c_str());
            return 0;
        }
        if (*gen) {
            anmin::Dataset data;
            if (*gen_sin_cmd) data = anmin::gen_sin(sin_n, sin_d, gen_seed);
            else if (*gen_sdf_cmd) data = anmin::gen_sdf(anmin::read_image(mask_path), normalize);
            else data = anmin::gen_dae(anmin::read_image(image_path), patch, gen_seed);
            anmin::save_csv(data, gen_out);
            std::printf("wrote %ld rows x %ld features, %ld targets to %s\n", static_cast<long>(data.rows()),
                        static_cast<long>(data.features()), static_cast<long>(data.outputs()), gen_out.c_str());
            return 0;
        }
        if (*cmp) {
            const auto records = anmin::read_record_dir(records_dir);
            const auto t = anmin::compare(records, label_a, label_b, metric);
            std::printf("%s: %s - %s over %zu paired splits\n", metric.c_str(), label_a.c_str(), label_b.c_str(), t.n);
            std::printf("mean diff %.6g  sd %.6g  t %.6g  p %.6g  %s\n", t.mean_diff, t.sd_diff, t.t, t.p_value,
                        t.significant ? "significant (p < 0.01)" : "not significant");
            return 0;
        }
        if (*exp) {
            const auto records = anmin::read_record_dir(records_dir);
            const auto files = anmin::export_traces(records, export_out);
            std::printf("wrote %zu trace files to %s\n", files.size(), export_out.c_str());
            return 0;
        }
    } catch (const anmin::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(anmin::ErrorKind::numerical);
    }
    return 0;
}
