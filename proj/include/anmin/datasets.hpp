#pragma once

#include "anmin/image.hpp"
#include "anmin/model.hpp"

#include <cstdint>
#include <utility>

namespace anmin {

/// x ~ N(0, I_d), y = sin(‖x‖²).
Dataset gen_sin(Eigen::Index n, Eigen::Index d, std::uint64_t seed);

/// One row per pixel, row-major: inputs (column, row), target the Euclidean
/// distance to the nearest pixel of the other class, negative inside the
/// shape. Pixels ≥ 128 are inside. Throws NotBinary when the image has values
/// other than 0 and 255, EmptyShape when either class is empty.
/// With `normalize`, coordinates are divided by max(width, height) − 1.
Dataset gen_sdf(const GrayImage& mask, bool normalize = false);

/// Exact squared Euclidean distance from each pixel to the nearest pixel
/// where `feature` is set (linear-time separable transform).
std::vector<double> squared_distance_transform(const std::vector<bool>& feature, int width, int height);

struct PatchConfig {
    int patch = 15;
    int stride = 3;
    double noise_sigma = 10.0;
};

/// Overlapping patch×patch windows at top-left offsets 0, stride, … strictly
/// below (dimension − patch), flattened row-major on the [0, 255] scale.
/// Targets are the clean patches, inputs the same plus N(0, σ²) noise.
Dataset gen_dae(const GrayImage& image, const PatchConfig& cfg, std::uint64_t seed);

/// Number of patch positions along one axis under the rule above.
int patch_positions(int extent, int patch, int stride);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::uint64_t split_index = 0;

    void validate() const;
};

/// Seeded permutation; the first ⌈fraction·N⌉ rows (at most N − 1) train.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Row indices of the split, train then test.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_indices(Eigen::Index n, const SplitSpec& spec);

/// Per-feature z-scoring fitted on one split and applied to others. The ones
/// column is left untouched; constant features keep scale 1.
class Standardizer {
public:
    static Standardizer fit(const Dataset& train);
    Dataset apply(const Dataset& data) const;

    const Vector& mean() const noexcept { return mean_; }
    const Vector& scale() const noexcept { return scale_; }

private:
    Vector mean_;
    Vector scale_;
};

}  // namespace anmin
