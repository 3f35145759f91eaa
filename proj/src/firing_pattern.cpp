#include "anmin/firing_pattern.hpp"

#include "anmin/error.hpp"

#include <string>

namespace anmin {

namespace {

void check(const Matrix& x, const Matrix& hidden) {
    if (x.cols() != hidden.rows())
        throw DimensionMismatch("design has " + std::to_string(x.cols()) + " columns, hidden weights have " +
                                std::to_string(hidden.rows()) + " rows");
}

}  // namespace

FiringPattern pattern_from_preactivations(const Matrix& preact, const ActivationConfig& act) {
    FiringPattern p;
    p.alpha = act.alpha();
    p.fired = (preact.array() > 0.0).cast<std::uint8_t>().matrix();
    const double on = 1.0;
    const double off = act.alpha();
    p.blend = (preact.array() > 0.0).select(Matrix::Constant(preact.rows(), preact.cols(), on),
                                            Matrix::Constant(preact.rows(), preact.cols(), off));
    return p;
}

FiringPattern compute_pattern(const Matrix& x, const Matrix& hidden, const ActivationConfig& act) {
    check(x, hidden);
    return pattern_from_preactivations(x * hidden, act);
}

Matrix hidden_features(const Matrix& x, const Matrix& hidden, const ActivationConfig& act) {
    check(x, hidden);
    Matrix s(x.rows(), hidden.cols() + 1);
    s.leftCols(hidden.cols()) = (x * hidden).unaryExpr([&](double v) { return act.apply(v); });
    s.col(hidden.cols()).setOnes();
    return s;
}

}  // namespace anmin
