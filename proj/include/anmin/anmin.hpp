#pragma once

// Alternating analytic minimization: ridge refit of the output layer, then a
// frozen-pattern critical-point solve for the hidden layer, repeated for a
// fixed number of iterations while keeping the lowest-loss model.

#include "anmin/layer_solvers.hpp"
#include "anmin/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace anmin {

enum class DegeneratePolicy { pseudo_solve, random_restart, stop };

std::string_view to_string(DegeneratePolicy policy);
DegeneratePolicy degenerate_policy_from_string(std::string_view name);

/// Switches for the ablation variants. The default is the full algorithm.
struct AblationConfig {
    bool track_min = true;
    DegeneratePolicy degenerate = DegeneratePolicy::pseudo_solve;
};

struct IterationRecord {
    int iteration = 0;
    double train_loss = 0.0;
    double train_mse = 0.0;
    std::optional<double> logdet;  // empty for the initialization row
    SolverPath path = SolverPath::none;
    double wall_seconds = 0.0;     // cumulative since the start of training
    double pre_refit_loss = 0.0;   // loss with the new A and the previous (B, b0); NaN on row 0
};

struct AnminTrace {
    std::vector<IterationRecord> iterations;
    double best_loss = 0.0;
    int best_iteration = 0;
    NetworkParams best_params;
    bool stopped_early = false;
};

struct TrainResult {
    NetworkParams params;  // best-so-far, or the final model when track_min is off
    AnminTrace trace;
};

/// i.i.d. uniform on (−1/√(d+1), 1/√(d+1)).
Matrix init_hidden(std::uint64_t seed, Eigen::Index inputs, Eigen::Index units);
Matrix init_hidden(std::mt19937_64& rng, Eigen::Index inputs, Eigen::Index units);

TrainResult train(const Dataset& data, const ActivationConfig& act, const HyperParams& hp, const AblationConfig& ab,
                  Eigen::Index units, std::uint64_t seed, int workers = 1);

struct Diagnostics {
    std::optional<double> min_logdet;
    std::optional<double> max_logdet;
    std::optional<double> final_logdet;
    int neg_inf_count = 0;
    int clamped_count = 0;
    int direct_count = 0;
    int reinitialized_count = 0;
    int best_iteration = 0;
};

Diagnostics diagnose(const AnminTrace& trace);

}  // namespace anmin
