#pragma once

#include "anmin/model.hpp"

#include <cstdint>

namespace anmin {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Which hidden units fire per observation. `fired(i, j)` is 1 iff (XA)ᵢⱼ > 0;
/// `blend = (1 − α) fired + α`, so σ(XA) = blend ⊙ XA for the A that produced it.
struct FiringPattern {
    BinaryMatrix fired;
    Matrix blend;
    double alpha = 0.0;
};

FiringPattern compute_pattern(const Matrix& x, const Matrix& hidden, const ActivationConfig& act);

/// Pattern from precomputed pre-activations XA.
FiringPattern pattern_from_preactivations(const Matrix& preact, const ActivationConfig& act);

/// S = (σ(XA), 1): activations followed by a ones column for the output bias.
Matrix hidden_features(const Matrix& x, const Matrix& hidden, const ActivationConfig& act);

}  // namespace anmin
