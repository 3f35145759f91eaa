#include "anmin/datasets.hpp"

#include "anmin/error.hpp"
#include "anmin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace anmin {

namespace {

constexpr double kFar = 1e20;

// 1-D squared distance transform of a sampled function (lower envelope of
// parabolas). f and d have length n.
void distance_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    auto at = [](auto& vec, int i) -> decltype(auto) { return (vec[static_cast<std::size_t>(i)]); };
    auto intersect = [&](int q, int p) {
        return ((at(f, q) + double(q) * q) - (at(f, p) + double(p) * p)) / (2.0 * (q - p));
    };
    int k = 0;
    at(v, 0) = 0;
    at(z, 0) = -std::numeric_limits<double>::infinity();
    at(z, 1) = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, at(v, k));
        while (s <= at(z, k)) {
            --k;
            s = intersect(q, at(v, k));
        }
        ++k;
        at(v, k) = q;
        at(z, k) = s;
        at(z, k + 1) = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (at(z, k + 1) < q) ++k;
        const int p = at(v, k);
        at(d, q) = double(q - p) * (q - p) + at(f, p);
    }
}

}  // namespace

Dataset gen_sin(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw ConfigError("gen_sin needs n >= 1 and d >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(n, d);
    Matrix y(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = normal(rng);
        y(i, 0) = std::sin(x.row(i).squaredNorm());
    }
    return Dataset::from_features(x, std::move(y));
}

std::vector<double> squared_distance_transform(const std::vector<bool>& feature, int width, int height) {
    const auto total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (feature.size() != total) throw DimensionMismatch("feature mask size differs from width*height");
    std::vector<double> grid(total);
    for (std::size_t i = 0; i < total; ++i) grid[i] = feature[i] ? 0.0 : kFar;

    const int longest = std::max(width, height);
    std::vector<double> f(static_cast<std::size_t>(longest)), d(static_cast<std::size_t>(longest));
    std::vector<int> v(static_cast<std::size_t>(longest));
    std::vector<double> z(static_cast<std::size_t>(longest) + 1);

    for (int c = 0; c < width; ++c) {
        f.resize(static_cast<std::size_t>(height));
        d.resize(static_cast<std::size_t>(height));
        for (int r = 0; r < height; ++r) f[static_cast<std::size_t>(r)] = grid[static_cast<std::size_t>(r) * width + c];
        distance_1d(f, d, v, z);
        for (int r = 0; r < height; ++r) grid[static_cast<std::size_t>(r) * width + c] = d[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < height; ++r) {
        f.resize(static_cast<std::size_t>(width));
        d.resize(static_cast<std::size_t>(width));
        for (int c = 0; c < width; ++c) f[static_cast<std::size_t>(c)] = grid[static_cast<std::size_t>(r) * width + c];
        distance_1d(f, d, v, z);
        for (int c = 0; c < width; ++c) grid[static_cast<std::size_t>(r) * width + c] = d[static_cast<std::size_t>(c)];
    }
    return grid;
}

Dataset gen_sdf(const GrayImage& mask, bool normalize) {
    if (mask.width < 1 || mask.height < 1) throw EmptyShape("mask image is empty");
    std::vector<bool> inside(mask.pixels.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
        const auto px = mask.pixels[i];
        if (px != 0 && px != 255)
            throw NotBinary("mask pixel " + std::to_string(i) + " has value " + std::to_string(px) +
                            "; expected 0 or 255");
        inside[i] = px >= 128;
        count += inside[i] ? 1 : 0;
    }
    if (count == 0) throw EmptyShape("mask has no inside pixels");
    if (count == mask.pixels.size()) throw EmptyShape("mask has no outside pixels");

    std::vector<bool> outside(inside.size());
    for (std::size_t i = 0; i < inside.size(); ++i) outside[i] = !inside[i];
    const auto to_inside = squared_distance_transform(inside, mask.width, mask.height);
    const auto to_outside = squared_distance_transform(outside, mask.width, mask.height);

    const auto n = static_cast<Eigen::Index>(mask.pixels.size());
    const double coord_scale = normalize ? 1.0 / std::max(1, std::max(mask.width, mask.height) - 1) : 1.0;
    Matrix x(n, 2);
    Matrix y(n, 1);
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            const auto i = static_cast<std::size_t>(r) * mask.width + c;
            const auto row = static_cast<Eigen::Index>(i);
            x(row, 0) = c * coord_scale;
            x(row, 1) = r * coord_scale;
            y(row, 0) = inside[i] ? -std::sqrt(to_outside[i]) : std::sqrt(to_inside[i]);
        }
    }
    return Dataset::from_features(x, std::move(y), {"col", "row"}, {"sdf"});
}

int patch_positions(int extent, int patch, int stride) {
    if (patch < 1 || stride < 1) throw ConfigError("patch and stride must be positive");
    if (extent <= patch) return 0;
    return (extent - patch - 1) / stride + 1;
}

Dataset gen_dae(const GrayImage& image, const PatchConfig& cfg, std::uint64_t seed) {
    if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
    const int rows_n = patch_positions(image.height, cfg.patch, cfg.stride);
    const int cols_n = patch_positions(image.width, cfg.patch, cfg.stride);
    if (rows_n == 0 || cols_n == 0)
        throw ImageTooSmall("image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                            " is too small for " + std::to_string(cfg.patch) + "x" + std::to_string(cfg.patch) +
                            " patches");
    const Eigen::Index n = static_cast<Eigen::Index>(rows_n) * cols_n;
    const Eigen::Index dim = static_cast<Eigen::Index>(cfg.patch) * cfg.patch;
    Matrix clean(n, dim);
    Eigen::Index i = 0;
    for (int pr = 0; pr < rows_n; ++pr) {
        for (int pc = 0; pc < cols_n; ++pc, ++i) {
            const int r0 = pr * cfg.stride;
            const int c0 = pc * cfg.stride;
            Eigen::Index k = 0;
            for (int r = 0; r < cfg.patch; ++r)
                for (int c = 0; c < cfg.patch; ++c) clean(i, k++) = image.at(r0 + r, c0 + c);
        }
    }
    Matrix noisy = clean;
    if (cfg.noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index k = 0; k < dim; ++k) noisy(r, k) += noise(rng);
    }
    std::vector<std::string> in_names, out_names;
    for (Eigen::Index k = 0; k < dim; ++k) {
        in_names.push_back("noisy" + std::to_string(k));
        out_names.push_back("clean" + std::to_string(k));
    }
    return Dataset::from_features(noisy, std::move(clean), std::move(in_names), std::move(out_names));
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_indices(Eigen::Index n, const SplitSpec& spec) {
    spec.validate();
    if (n < 2) throw DataError("split needs at least two rows");
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::mt19937_64 rng(mix_seed(spec.seed, spec.split_index));
    std::shuffle(perm.begin(), perm.end(), rng);
    auto n_train = static_cast<Eigen::Index>(std::ceil(spec.train_fraction * static_cast<double>(n) - 1e-9));
    n_train = std::clamp<Eigen::Index>(n_train, 1, n - 1);
    std::vector<Eigen::Index> train(perm.begin(), perm.begin() + n_train);
    std::vector<Eigen::Index> test(perm.begin() + n_train, perm.end());
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
    auto [train, test] = split_indices(data.rows(), spec);
    return {data.subset(train), data.subset(test)};
}

Standardizer Standardizer::fit(const Dataset& train) {
    Standardizer s;
    const Eigen::Index d = train.features();
    const double n = static_cast<double>(train.rows());
    s.mean_ = train.x.rightCols(d).colwise().mean().transpose();
    s.scale_.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double var = (train.x.col(j + 1).array() - s.mean_(j)).square().sum() / n;
        s.scale_(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
    if (data.features() != mean_.size()) throw DimensionMismatch("standardizer fitted on a different feature count");
    Dataset out = data;
    for (Eigen::Index j = 0; j < mean_.size(); ++j)
        out.x.col(j + 1) = (out.x.col(j + 1).array() - mean_(j)) / scale_(j);
    return out;
}

}  // namespace anmin
