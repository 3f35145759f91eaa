#include "anmin/baseline_gd.hpp"

#include "anmin/anmin.hpp"
#include "anmin/error.hpp"
#include "anmin/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace anmin {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kDivergenceLoss = 1e12;

struct AdamState {
    Gradients m;
    Gradients v;
    long step = 0;
};

Gradients zeros_like(const NetworkParams& p) {
    return Gradients{Matrix::Zero(p.hidden.rows(), p.hidden.cols()), Matrix::Zero(p.output.rows(), p.output.cols()),
                     Vector::Zero(p.bias.size())};
}

template <typename Param, typename Grad>
void adam_update(Param& param, const Grad& grad, Grad& m, Grad& v, double lr, double b1, double b2, double eps,
                 double c1, double c2) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

std::string_view to_string(Optimizer opt) { return opt == Optimizer::sgd ? "sgd" : "adam"; }

Optimizer optimizer_from_string(std::string_view name) {
    if (name == "sgd") return Optimizer::sgd;
    if (name == "adam") return Optimizer::adam;
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

GdConfig GdConfig::sgd_defaults() {
    GdConfig c;
    c.optimizer = Optimizer::sgd;
    c.lr0 = 0.01;
    return c;
}

GdConfig GdConfig::adam_defaults() { return GdConfig{}; }

double GdConfig::learning_rate(int epoch) const {
    return lr0 / std::pow(decay_factor, static_cast<double>(epoch / decay_every));
}

void GdConfig::validate() const {
    if (!(lr0 >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch < 1) throw ConfigError("batch size must be positive");
    if (decay_every < 1) throw ConfigError("decay_every must be positive");
    if (!(decay_factor > 0.0)) throw ConfigError("decay_factor must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw ConfigError("Adam betas must lie in [0, 1)");
    if (!(adam_eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

Gradients gradients(const NetworkParams& params, const ActivationConfig& act, const Matrix& x, const Matrix& y,
                    double lambda) {
    params.validate();
    if (x.cols() != params.hidden.rows() || x.rows() != y.rows() || y.cols() != params.outputs())
        throw DimensionMismatch("batch shapes do not match the network");
    const double n = static_cast<double>(x.rows());
    const double alpha = act.alpha();

    const Matrix pre = x * params.hidden;
    const Matrix hidden = pre.unaryExpr([&](double v) { return v > 0.0 ? v : alpha * v; });
    Matrix out = hidden * params.output;
    out.rowwise() += params.bias.transpose();

    const Matrix d_out = (2.0 / n) * (out - y);
    Gradients g;
    g.output = hidden.transpose() * d_out + 2.0 * lambda * params.output;
    g.bias = d_out.colwise().sum().transpose() + 2.0 * lambda * params.bias;
    const Matrix slope = pre.unaryExpr([&](double v) { return v > 0.0 ? 1.0 : alpha; });
    const Matrix d_pre = (d_out * params.output.transpose()).cwiseProduct(slope);
    g.hidden = x.transpose() * d_pre + 2.0 * lambda * params.hidden;
    return g;
}

NetworkParams init_network(std::uint64_t seed, Eigen::Index inputs, Eigen::Index units, Eigen::Index outputs) {
    std::mt19937_64 rng(seed);
    NetworkParams p;
    p.hidden = init_hidden(rng, inputs, units);
    const double bound = 1.0 / std::sqrt(static_cast<double>(units));
    std::uniform_real_distribution<double> dist(-bound, bound);
    p.output.resize(units, outputs);
    for (Eigen::Index k = 0; k < outputs; ++k)
        for (Eigen::Index j = 0; j < units; ++j) p.output(j, k) = dist(rng);
    p.bias.resize(outputs);
    for (Eigen::Index k = 0; k < outputs; ++k) p.bias(k) = dist(rng);
    return p;
}

GdResult train_gd_from(const Dataset& data, const ActivationConfig& act, const GdConfig& cfg, NetworkParams start,
                       std::uint64_t seed) {
    data.validate();
    cfg.validate();
    start.validate();
    const auto t0 = Clock::now();
    std::mt19937_64 shuffle_rng(mix_seed(seed, 1));

    GdResult result;
    result.params = std::move(start);
    NetworkParams& p = result.params;

    auto record = [&](int epoch) {
        const Matrix pred = forward(p, act, data.x);
        EpochRecord r;
        r.epoch = epoch;
        r.train_loss = loss_from_predictions(p, pred, data.y, cfg.lambda);
        r.train_mse = mse_from_predictions(pred, data.y);
        r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        result.trace.push_back(r);
        return std::isfinite(r.train_loss) && r.train_loss <= kDivergenceLoss;
    };
    if (!record(0)) {
        result.diverged = true;
        return result;
    }

    const Eigen::Index n = data.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    AdamState adam{zeros_like(p), zeros_like(p), 0};
    Matrix bx, by;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cfg.learning_rate(epoch);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (Eigen::Index start_row = 0; start_row < n; start_row += cfg.batch) {
            const Eigen::Index rows = std::min<Eigen::Index>(cfg.batch, n - start_row);
            bx.resize(rows, data.x.cols());
            by.resize(rows, data.y.cols());
            for (Eigen::Index i = 0; i < rows; ++i) {
                const auto src = order[static_cast<std::size_t>(start_row + i)];
                bx.row(i) = data.x.row(src);
                by.row(i) = data.y.row(src);
            }
            const Gradients g = gradients(p, act, bx, by, cfg.lambda);
            if (cfg.optimizer == Optimizer::sgd) {
                if (!cfg.freeze_hidden) p.hidden -= lr * g.hidden;
                p.output -= lr * g.output;
                p.bias -= lr * g.bias;
            } else {
                ++adam.step;
                const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.step));
                const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.step));
                if (!cfg.freeze_hidden)
                    adam_update(p.hidden, g.hidden, adam.m.hidden, adam.v.hidden, lr, cfg.adam_beta1,
                                cfg.adam_beta2, cfg.adam_eps, c1, c2);
                adam_update(p.output, g.output, adam.m.output, adam.v.output, lr, cfg.adam_beta1, cfg.adam_beta2,
                            cfg.adam_eps, c1, c2);
                adam_update(p.bias, g.bias, adam.m.bias, adam.v.bias, lr, cfg.adam_beta1, cfg.adam_beta2,
                            cfg.adam_eps, c1, c2);
            }
            if (!p.hidden.allFinite() || !p.output.allFinite() || !p.bias.allFinite()) {
                result.diverged = true;
                return result;
            }
        }
        if (!record(epoch + 1)) {
            result.diverged = true;
            return result;
        }
    }
    return result;
}

GdResult train_gd(const Dataset& data, const ActivationConfig& act, const GdConfig& cfg, Eigen::Index units,
                  std::uint64_t seed) {
    return train_gd_from(data, act, cfg, init_network(seed, data.features(), units, data.outputs()), seed);
}

}  // namespace anmin
