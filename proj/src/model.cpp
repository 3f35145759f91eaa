#include "anmin/model.hpp"

#include "anmin/error.hpp"

#include <cmath>
#include <string>

namespace anmin {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void check_compatible(const NetworkParams& params, const Matrix& x) {
    params.validate();
    if (x.cols() != params.hidden.rows())
        throw DimensionMismatch("design " + shape(x) + " vs hidden weights " + shape(params.hidden));
}

}  // namespace

ActivationConfig::ActivationConfig(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("activation alpha must lie in [0, 1)");
}

void NetworkParams::validate() const {
    if (hidden.cols() != output.rows())
        throw DimensionMismatch("hidden weights " + shape(hidden) + " vs output weights " + shape(output));
    if (output.cols() != bias.size())
        throw DimensionMismatch("output weights " + shape(output) + " vs bias length " + std::to_string(bias.size()));
    if (hidden.rows() < 1) throw DimensionMismatch("hidden weights need at least the bias row");
    if (!hidden.allFinite() || !output.allFinite() || !bias.allFinite())
        throw NumericalError("network parameters contain non-finite values");
}

void Dataset::validate() const {
    if (x.rows() < 1) throw DataError("dataset has no rows");
    if (x.cols() < 1) throw DataError("design matrix has no columns");
    if (x.rows() != y.rows())
        throw DimensionMismatch("design " + shape(x) + " vs targets " + shape(y));
    if (!(x.col(0).array() == 1.0).all()) throw DataError("first design column must be all ones");
    if (!x.allFinite() || !y.allFinite()) throw DataError("dataset contains non-finite values");
}

Dataset Dataset::from_features(const Matrix& features, Matrix targets, std::vector<std::string> feature_names,
                               std::vector<std::string> target_names) {
    if (features.rows() != targets.rows())
        throw DimensionMismatch("features " + shape(features) + " vs targets " + shape(targets));
    Dataset ds;
    ds.x.resize(features.rows(), features.cols() + 1);
    ds.x.col(0).setOnes();
    ds.x.rightCols(features.cols()) = features;
    ds.y = std::move(targets);
    if (feature_names.empty())
        for (Eigen::Index j = 0; j < features.cols(); ++j) feature_names.push_back("x" + std::to_string(j));
    if (target_names.empty())
        for (Eigen::Index k = 0; k < ds.y.cols(); ++k) target_names.push_back("y" + std::to_string(k));
    ds.feature_names = std::move(feature_names);
    ds.target_names = std::move(target_names);
    return ds;
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
    Dataset out;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()), y.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = rows[i];
        out.x.row(static_cast<Eigen::Index>(i)) = x.row(r);
        out.y.row(static_cast<Eigen::Index>(i)) = y.row(r);
    }
    out.feature_names = feature_names;
    out.target_names = target_names;
    return out;
}

void HyperParams::validate() const {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    if (iterations < 0) throw ConfigError("iterations must be non-negative");
    if (!(clamp > 0.0)) throw ConfigError("clamp must be positive");
    if (accumulation_batch < 1) throw ConfigError("accumulation batch must be positive");
    if (std::isnan(tau)) throw ConfigError("tau must not be NaN");
}

Matrix forward(const NetworkParams& params, const ActivationConfig& act, const Matrix& x) {
    check_compatible(params, x);
    Matrix hidden = x * params.hidden;
    hidden = hidden.unaryExpr([&](double v) { return act.apply(v); });
    Matrix out = hidden * params.output;
    out.rowwise() += params.bias.transpose();
    return out;
}

double loss_from_predictions(const NetworkParams& params, const Matrix& predictions, const Matrix& targets,
                             double lambda) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw DimensionMismatch("predictions " + shape(predictions) + " vs targets " + shape(targets));
    const double n = static_cast<double>(targets.rows());
    const double fit = (predictions - targets).squaredNorm() / n;
    const double penalty =
        params.bias.squaredNorm() + params.output.squaredNorm() + params.hidden.squaredNorm();
    return fit + lambda * penalty;
}

double loss(const NetworkParams& params, const ActivationConfig& act, const Dataset& data, double lambda) {
    return loss_from_predictions(params, forward(params, act, data.x), data.y, lambda);
}

double mse_from_predictions(const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw DimensionMismatch("predictions " + shape(predictions) + " vs targets " + shape(targets));
    return (predictions - targets).squaredNorm() / static_cast<double>(targets.size());
}

double mse(const NetworkParams& params, const ActivationConfig& act, const Dataset& data) {
    return mse_from_predictions(forward(params, act, data.x), data.y);
}

Vector r_squared_per_output(const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw DimensionMismatch("predictions " + shape(predictions) + " vs targets " + shape(targets));
    if (targets.rows() < 2) throw DataError("R² needs at least two rows");
    Vector r2(targets.cols());
    for (Eigen::Index k = 0; k < targets.cols(); ++k) {
        const double mean = targets.col(k).mean();
        const double sst = (targets.col(k).array() - mean).square().sum();
        const double sse = (predictions.col(k) - targets.col(k)).squaredNorm();
        r2(k) = sst == 0.0 ? std::nan("") : 1.0 - sse / sst;
    }
    return r2;
}

double r_squared_from_predictions(const Matrix& predictions, const Matrix& targets) {
    const Vector r2 = r_squared_per_output(predictions, targets);
    double total = 0.0;
    Eigen::Index defined = 0;
    for (Eigen::Index k = 0; k < r2.size(); ++k) {
        if (std::isnan(r2(k))) continue;
        total += r2(k);
        ++defined;
    }
    if (defined == 0) throw DegenerateTargets("every target column is constant; R² undefined");
    return total / static_cast<double>(defined);
}

double r_squared(const NetworkParams& params, const ActivationConfig& act, const Dataset& data) {
    return r_squared_from_predictions(forward(params, act, data.x), data.y);
}

}  // namespace anmin
