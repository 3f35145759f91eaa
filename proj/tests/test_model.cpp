#include "anmin/error.hpp"
#include "anmin/model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace anmin;

namespace {

NetworkParams single_unit() {
    NetworkParams p;
    p.hidden = Matrix(2, 1);
    p.hidden << 0, 1;
    p.output = Matrix::Ones(1, 1);
    p.bias = Vector::Zero(1);
    return p;
}

Matrix design(std::initializer_list<double> xs) {
    Matrix x(static_cast<Eigen::Index>(xs.size()), 2);
    Eigen::Index i = 0;
    for (double v : xs) {
        x(i, 0) = 1.0;
        x(i++, 1) = v;
    }
    return x;
}

}  // namespace

TEST(Activation, RejectsOutOfRangeSlope) {
    EXPECT_THROW(ActivationConfig(1.0), ConfigError);
    EXPECT_THROW(ActivationConfig(-0.1), ConfigError);
    EXPECT_NO_THROW(ActivationConfig(0.0));
    EXPECT_NO_THROW(ActivationConfig(0.99));
}

TEST(Activation, LeakyFormula) {
    const ActivationConfig act(0.1);
    EXPECT_DOUBLE_EQ(act.apply(2.0), 2.0);
    EXPECT_DOUBLE_EQ(act.apply(-3.0), -0.3);
    EXPECT_DOUBLE_EQ(act.apply(0.0), 0.0);
}

TEST(Forward, DeadHiddenLayerGivesBias) {
    NetworkParams p{Matrix::Zero(3, 4), Matrix::Ones(4, 1), Vector::Constant(1, 2.0)};
    Matrix x = Matrix::Ones(3, 3);
    x.col(1) << 1, -5, 7;
    x.col(2) << 0, 3, -2;
    const Matrix out = forward(p, ActivationConfig(0.0), x);
    EXPECT_TRUE((out.array() == 2.0).all());
}

TEST(Forward, SingleReluUnit) {
    const Matrix out = forward(single_unit(), ActivationConfig(0.0), design({-3, 2}));
    EXPECT_DOUBLE_EQ(out(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(out(1, 0), 2.0);
    const Matrix leaky = forward(single_unit(), ActivationConfig(0.1), design({-3}));
    EXPECT_DOUBLE_EQ(leaky(0, 0), -0.3);
}

TEST(Forward, DimensionMismatch) {
    EXPECT_THROW(forward(single_unit(), ActivationConfig(0.0), Matrix::Ones(2, 3)), DimensionMismatch);
    NetworkParams bad = single_unit();
    bad.bias = Vector::Zero(2);
    EXPECT_THROW(forward(bad, ActivationConfig(0.0), design({1})), DimensionMismatch);
}

TEST(NetworkParams, ValidateRejectsNonFinite) {
    NetworkParams p = single_unit();
    p.output(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(p.validate(), NumericalError);
}

TEST(Dataset, RequiresOnesColumn) {
    Dataset d{Matrix::Zero(2, 2), Matrix::Zero(2, 1), {}, {}};
    EXPECT_THROW(d.validate(), DataError);
    auto ok = Dataset::from_features(Matrix::Zero(2, 1), Matrix::Zero(2, 1));
    EXPECT_NO_THROW(ok.validate());
    EXPECT_TRUE((ok.x.col(0).array() == 1.0).all());
}

TEST(Dataset, RejectsNonFiniteAndEmpty) {
    Matrix f = Matrix::Zero(2, 1);
    f(1, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(Dataset::from_features(f, Matrix::Zero(2, 1)).validate(), DataError);
    Dataset empty{Matrix::Zero(0, 2), Matrix::Zero(0, 1), {}, {}};
    EXPECT_THROW(empty.validate(), DataError);
}

TEST(HyperParams, Defaults) {
    HyperParams hp;
    EXPECT_DOUBLE_EQ(hp.lambda, 0.001);
    EXPECT_DOUBLE_EQ(hp.tau, -10000.0);
    EXPECT_EQ(hp.iterations, 30);
    EXPECT_DOUBLE_EQ(hp.clamp, 1e-4);
    EXPECT_EQ(hp.accumulation_batch, 256);
    hp.accumulation_batch = 0;
    EXPECT_THROW(hp.validate(), ConfigError);
}

TEST(Loss, PerfectFitIsZero) {
    const Dataset d = Dataset::from_features(Matrix(design({-3, 2}).col(1)), Matrix((Matrix(2, 1) << 0, 2).finished()));
    EXPECT_DOUBLE_EQ(loss(single_unit(), ActivationConfig(0.0), d, 0.0), 0.0);
}

TEST(Loss, ZeroParamsOnOnesTargets) {
    const Dataset d = Dataset::from_features(Matrix::Zero(4, 2), Matrix::Ones(4, 1));
    NetworkParams p{Matrix::Zero(3, 2), Matrix::Zero(2, 1), Vector::Zero(1)};
    EXPECT_DOUBLE_EQ(loss(p, ActivationConfig(0.0), d, 0.0), 1.0);
}

TEST(Loss, MatchesNaiveSummation) {
    std::mt19937_64 rng(2);
    const auto d = oracle::random_dataset(rng, 20, 3, 2);
    const auto p = oracle::random_params(rng, 3, 4, 2);
    for (double alpha : {0.0, 0.1})
        for (double lambda : {0.0, 0.001, 0.5}) {
            const double expected = oracle::naive_loss(p, alpha, d.x, d.y, lambda);
            EXPECT_NEAR(loss(p, ActivationConfig(alpha), d, lambda), expected, 1e-12 * std::abs(expected));
        }
}

TEST(Loss, EqualsOutputsTimesMseWithoutShrinkage) {
    std::mt19937_64 rng(14);
    const auto d = oracle::random_dataset(rng, 30, 2, 3);
    const auto p = oracle::random_params(rng, 2, 5, 3);
    const ActivationConfig act(0.0);
    EXPECT_NEAR(loss(p, act, d, 0.0), 3.0 * mse(p, act, d), 1e-12);
}

TEST(Loss, PositiveHomogeneityOfReluUnits) {
    std::mt19937_64 rng(15);
    const auto d = oracle::random_dataset(rng, 25, 3, 2);
    auto p = oracle::random_params(rng, 3, 4, 2);
    const ActivationConfig act(0.0);
    const double before = loss(p, act, d, 0.0);
    p.hidden.col(2) *= 3.7;
    p.output.row(2) /= 3.7;
    EXPECT_NEAR(loss(p, act, d, 0.0), before, 1e-10);
}

TEST(Metrics, PerfectPredictions) {
    std::mt19937_64 rng(9);
    const Matrix y = oracle::random_matrix(rng, 10, 2);
    EXPECT_DOUBLE_EQ(mse_from_predictions(y, y), 0.0);
    EXPECT_DOUBLE_EQ(r_squared_from_predictions(y, y), 1.0);
}

TEST(Metrics, ColumnMeanPredictionsGiveZeroRSquared) {
    std::mt19937_64 rng(9);
    const Matrix y = oracle::random_matrix(rng, 10, 2);
    Matrix pred = y.colwise().mean().replicate(10, 1);
    EXPECT_NEAR(r_squared_from_predictions(pred, y), 0.0, 1e-14);
}

TEST(Metrics, MatchExplicitSums) {
    std::mt19937_64 rng(9);
    const Matrix y = oracle::random_matrix(rng, 12, 3);
    const Matrix pred = y + 0.3 * oracle::random_matrix(rng, 12, 3);
    double sse = 0.0, r2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        double mean = 0.0, ssek = 0.0, sst = 0.0;
        for (int i = 0; i < 12; ++i) mean += y(i, k);
        mean /= 12.0;
        for (int i = 0; i < 12; ++i) {
            ssek += (pred(i, k) - y(i, k)) * (pred(i, k) - y(i, k));
            sst += (y(i, k) - mean) * (y(i, k) - mean);
        }
        sse += ssek;
        r2 += 1.0 - ssek / sst;
    }
    EXPECT_NEAR(mse_from_predictions(pred, y), sse / 36.0, 1e-12);
    EXPECT_NEAR(r_squared_from_predictions(pred, y), r2 / 3.0, 1e-12);
}

TEST(Metrics, ConstantTargetColumn) {
    Matrix y(3, 2);
    y << 1, 5, 2, 5, 3, 5;
    Matrix pred = y;
    pred(0, 0) = 1.5;
    const Vector per = r_squared_per_output(pred, y);
    EXPECT_TRUE(std::isnan(per(1)));
    EXPECT_FALSE(std::isnan(r_squared_from_predictions(pred, y)));
    EXPECT_THROW(r_squared_from_predictions(Matrix::Zero(3, 1), Matrix::Constant(3, 1, 5.0)), DegenerateTargets);
}

TEST(Metrics, RSquaredNeedsTwoRows) {
    EXPECT_THROW(r_squared_from_predictions(Matrix::Zero(1, 1), Matrix::Ones(1, 1)), DataError);
}
