#pragma once

#include "anmin/linalg.hpp"

#include <string>
#include <vector>

namespace anmin {

/// Leaky-ReLU slope: σ(x) = αx + (1 − α) max(0, x), 0 ≤ α < 1.
class ActivationConfig {
public:
    ActivationConfig() = default;
    explicit ActivationConfig(double alpha);

    double alpha() const noexcept { return alpha_; }
    double apply(double x) const noexcept { return x > 0.0 ? x : alpha_ * x; }

private:
    double alpha_ = 0.0;
};

/// Hidden weights A ((d+1)×h, first row multiplies the constant 1), output
/// weights B (h×c), output biases b0 (length c).
struct NetworkParams {
    Matrix hidden;
    Matrix output;
    Vector bias;

    Eigen::Index inputs() const noexcept { return hidden.rows() - 1; }
    Eigen::Index units() const noexcept { return hidden.cols(); }
    Eigen::Index outputs() const noexcept { return output.cols(); }

    /// Throws DimensionMismatch or NumericalError on a broken invariant.
    void validate() const;
};

/// Design matrix with a leading column of ones, plus targets.
struct Dataset {
    Matrix x;
    Matrix y;
    std::vector<std::string> feature_names;
    std::vector<std::string> target_names;

    Eigen::Index rows() const noexcept { return x.rows(); }
    Eigen::Index features() const noexcept { return x.cols() - 1; }
    Eigen::Index outputs() const noexcept { return y.cols(); }

    void validate() const;

    /// Builds a dataset from raw features (no ones column).
    static Dataset from_features(const Matrix& features, Matrix targets, std::vector<std::string> feature_names = {},
                                 std::vector<std::string> target_names = {});

    Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct HyperParams {
    double lambda = 0.001;
    double tau = -10000.0;
    int iterations = 30;
    double clamp = kDefaultClamp;
    int accumulation_batch = 256;

    void validate() const;
};

/// σ(X A) B + b0.
Matrix forward(const NetworkParams& params, const ActivationConfig& act, const Matrix& x);

/// Regularized square loss: (1/N) ΣᵢΣₖ (ŷ − y)² + λ (‖b0‖² + ‖B‖² + ‖A‖²).
double loss(const NetworkParams& params, const ActivationConfig& act, const Dataset& data, double lambda);

/// Same loss evaluated from precomputed predictions.
double loss_from_predictions(const NetworkParams& params, const Matrix& predictions, const Matrix& targets,
                             double lambda);

/// SSE / (N c).
double mse(const NetworkParams& params, const ActivationConfig& act, const Dataset& data);
double mse_from_predictions(const Matrix& predictions, const Matrix& targets);

/// 1 − SSE_k/SST_k per output; NaN for outputs with constant targets.
Vector r_squared_per_output(const Matrix& predictions, const Matrix& targets);

/// Mean of the defined per-output R² values. Throws DegenerateTargets when
/// every output is constant.
double r_squared_from_predictions(const Matrix& predictions, const Matrix& targets);
double r_squared(const NetworkParams& params, const ActivationConfig& act, const Dataset& data);

}  // namespace anmin
