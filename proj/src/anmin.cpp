#include "anmin/anmin.hpp"

#include "anmin/error.hpp"
#include "anmin/firing_pattern.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace anmin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

NetworkParams refit_output(const Dataset& data, const ActivationConfig& act, Matrix hidden, double lambda) {
    const Matrix s = hidden_features(data.x, hidden, act);
    OutputFit fit = fit_output_layer(s, data.y, lambda);
    return NetworkParams{std::move(hidden), std::move(fit.weights), std::move(fit.bias)};
}

IterationRecord evaluate(const Dataset& data, const ActivationConfig& act, const NetworkParams& params,
                         double lambda, int iteration) {
    const Matrix pred = forward(params, act, data.x);
    IterationRecord rec;
    rec.iteration = iteration;
    rec.train_loss = loss_from_predictions(params, pred, data.y, lambda);
    rec.train_mse = mse_from_predictions(pred, data.y);
    return rec;
}

}  // namespace

std::string_view to_string(DegeneratePolicy policy) {
    switch (policy) {
        case DegeneratePolicy::pseudo_solve: return "pseudo_solve";
        case DegeneratePolicy::random_restart: return "random_restart";
        case DegeneratePolicy::stop: return "stop";
    }
    return "pseudo_solve";
}

DegeneratePolicy degenerate_policy_from_string(std::string_view name) {
    if (name == "pseudo_solve" || name == "pinv") return DegeneratePolicy::pseudo_solve;
    if (name == "random_restart" || name == "restart") return DegeneratePolicy::random_restart;
    if (name == "stop") return DegeneratePolicy::stop;
    throw ConfigError("unknown degenerate policy '" + std::string(name) + "'");
}

Matrix init_hidden(std::mt19937_64& rng, Eigen::Index inputs, Eigen::Index units) {
    if (units < 1) throw ConfigError("need at least one hidden unit");
    if (inputs < 0) throw ConfigError("input dimension must be non-negative");
    const double bound = 1.0 / std::sqrt(static_cast<double>(inputs + 1));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix a(inputs + 1, units);
    for (Eigen::Index j = 0; j < units; ++j)
        for (Eigen::Index r = 0; r <= inputs; ++r) a(r, j) = dist(rng);
    return a;
}

Matrix init_hidden(std::uint64_t seed, Eigen::Index inputs, Eigen::Index units) {
    std::mt19937_64 rng(seed);
    return init_hidden(rng, inputs, units);
}

TrainResult train(const Dataset& data, const ActivationConfig& act, const HyperParams& hp, const AblationConfig& ab,
                  Eigen::Index units, std::uint64_t seed, int workers) {
    data.validate();
    hp.validate();
    const auto start = Clock::now();
    std::mt19937_64 rng(seed);

    NetworkParams current = refit_output(data, act, init_hidden(rng, data.features(), units), hp.lambda);

    AnminTrace trace;
    {
        IterationRecord rec = evaluate(data, act, current, hp.lambda, 0);
        rec.pre_refit_loss = std::numeric_limits<double>::quiet_NaN();
        rec.wall_seconds = seconds_since(start);
        trace.iterations.push_back(rec);
        trace.best_loss = rec.train_loss;
        trace.best_params = current;
    }

    for (int it = 1; it <= hp.iterations; ++it) {
        const FiringPattern pattern = compute_pattern(data.x, current.hidden, act);
        const GramBlocks blocks = accumulate_gram(data.x, pattern, hp.accumulation_batch, workers);
        const NormalSystem sys =
            assemble_system(blocks, current.output, current.bias, data.y, data.x, pattern, hp.lambda);
        const bool degenerate = !(sys.logdet > hp.tau);

        Matrix next_hidden;
        SolverPath path;
        if (degenerate && ab.degenerate == DegeneratePolicy::stop) {
            trace.stopped_early = true;
            break;
        } else if (degenerate && ab.degenerate == DegeneratePolicy::random_restart) {
            next_hidden = init_hidden(rng, data.features(), units);
            path = SolverPath::reinitialized;
        } else {
            HiddenSolve solved = solve_hidden_layer(sys, hp.tau, hp.clamp);
            next_hidden = std::move(solved.hidden);
            path = solved.path;
        }

        const NetworkParams before_refit{next_hidden, current.output, current.bias};
        const double pre_refit = loss(before_refit, act, data, hp.lambda);

        current = refit_output(data, act, std::move(next_hidden), hp.lambda);
        IterationRecord rec = evaluate(data, act, current, hp.lambda, it);
        if (!std::isfinite(rec.train_loss))
            throw NumericalError("training loss became non-finite at iteration " + std::to_string(it));
        rec.logdet = sys.logdet;
        rec.path = path;
        rec.pre_refit_loss = pre_refit;
        rec.wall_seconds = seconds_since(start);
        trace.iterations.push_back(rec);

        if (rec.train_loss < trace.best_loss) {
            trace.best_loss = rec.train_loss;
            trace.best_iteration = it;
            trace.best_params = current;
        }
    }

    return TrainResult{ab.track_min ? trace.best_params : current, std::move(trace)};
}

Diagnostics diagnose(const AnminTrace& trace) {
    if (trace.iterations.empty()) throw ConfigError("cannot diagnose an empty trace");
    Diagnostics d;
    d.best_iteration = trace.best_iteration;
    for (const auto& rec : trace.iterations) {
        switch (rec.path) {
            case SolverPath::direct: ++d.direct_count; break;
            case SolverPath::svd_clamped: ++d.clamped_count; break;
            case SolverPath::reinitialized: ++d.reinitialized_count; break;
            case SolverPath::none: break;
        }
        if (!rec.logdet) continue;
        const double v = *rec.logdet;
        if (std::isinf(v) && v < 0) ++d.neg_inf_count;
        d.min_logdet = d.min_logdet ? std::min(*d.min_logdet, v) : v;
        d.max_logdet = d.max_logdet ? std::max(*d.max_logdet, v) : v;
        d.final_logdet = v;
    }
    return d;
}

}  // namespace anmin
