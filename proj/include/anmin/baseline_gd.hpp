#pragma once

// Minibatch SGD and Adam on the same two-layer network, with analytic
// gradients of the regularized square loss and a step-decay schedule.

#include "anmin/model.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace anmin {

enum class Optimizer { sgd, adam };

std::string_view to_string(Optimizer opt);
Optimizer optimizer_from_string(std::string_view name);

struct GdConfig {
    Optimizer optimizer = Optimizer::adam;
    double lr0 = 0.03;
    int epochs = 300;
    int batch = 256;
    int decay_every = 100;
    double decay_factor = 10.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double lambda = 0.0;
    bool freeze_hidden = false;  // leave A at its initial value

    static GdConfig sgd_defaults();
    static GdConfig adam_defaults();

    double learning_rate(int epoch) const;
    void validate() const;
};

/// Gradient with the same shapes as NetworkParams.
struct Gradients {
    Matrix hidden;
    Matrix output;
    Vector bias;
};

/// Exact gradient of (1/n) ΣᵢΣₖ (ŷ − y)² + λ (‖b0‖² + ‖B‖² + ‖A‖²) over the
/// given rows. σ'(0) is taken as α, matching the strict firing convention.
Gradients gradients(const NetworkParams& params, const ActivationConfig& act, const Matrix& x, const Matrix& y,
                    double lambda);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_mse = 0.0;
    double wall_seconds = 0.0;
};

struct GdResult {
    NetworkParams params;
    std::vector<EpochRecord> trace;  // epoch 0 is the initialization
    bool diverged = false;
};

/// A from init_hidden; B and b0 uniform on (−1/√h, 1/√h).
NetworkParams init_network(std::uint64_t seed, Eigen::Index inputs, Eigen::Index units, Eigen::Index outputs);

/// Runs cfg.epochs passes with seeded shuffling. Stops and sets `diverged`
/// once the full-train loss exceeds 1e12 or stops being finite.
GdResult train_gd(const Dataset& data, const ActivationConfig& act, const GdConfig& cfg, Eigen::Index units,
                  std::uint64_t seed);

/// Same, from caller-supplied starting parameters.
GdResult train_gd_from(const Dataset& data, const ActivationConfig& act, const GdConfig& cfg, NetworkParams start,
                       std::uint64_t seed);

}  // namespace anmin
