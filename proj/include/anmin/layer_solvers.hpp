#pragma once

// Closed-form fits for the two layers.
//
// Output layer: for every output k solve
//     ((1/N) SᵀS + λI) (b_k; b0_k) = (1/N) Sᵀ y_k.
//
// Hidden layer, with the firing pattern G frozen: the loss is a quadratic in
// the stacked per-unit weights a = (a_1; …; a_h), a_j = column j of A. Its
// critical point solves (M + λI) a = rhs with
//     U_jl = (1/N) Σᵢ G_ij G_il x̃ᵢ x̃ᵢᵀ,
//     M_jl = (Σ_k b_jk b_lk) U_jl,
//     rhs_j = (1/N) Σ_k Σᵢ b_jk (y_ik − b0_k) G_ij x̃ᵢ.

#include "anmin/firing_pattern.hpp"
#include "anmin/linalg.hpp"

#include <string_view>

namespace anmin {

struct OutputFit {
    Matrix weights;  // h×c
    Vector bias;     // c
};

/// Ridge fit of (B, b0) on S = (σ(XA), 1). Throws SingularMatrix when the
/// Gram matrix cannot be factored (only possible at λ = 0).
OutputFit fit_output_layer(const Matrix& features, const Matrix& targets, double lambda);

/// All U_jl blocks, held as one symmetric matrix of order (d+1)h whose (j, l)
/// block of size (d+1) is U_jl.
class GramBlocks {
public:
    GramBlocks(Matrix full, Eigen::Index block_size);

    Eigen::Index block_size() const noexcept { return block_size_; }
    Eigen::Index units() const noexcept { return full_.rows() / block_size_; }
    const Matrix& full() const noexcept { return full_; }

    auto block(Eigen::Index j, Eigen::Index l) const {
        return full_.block(j * block_size_, l * block_size_, block_size_, block_size_);
    }

private:
    Matrix full_;
    Eigen::Index block_size_;
};

/// Accumulates the U_jl over row batches of `batch` rows. With workers > 1 the
/// batches are split into contiguous ranges whose partial sums are combined in
/// worker order, so the result is reproducible for a fixed worker count.
GramBlocks accumulate_gram(const Matrix& x, const FiringPattern& pattern, int batch, int workers = 1);

struct NormalSystem {
    Matrix m;  // M + λI
    Vector rhs;
    double logdet = 0.0;
    Eigen::Index block_size = 0;  // d + 1
};

NormalSystem assemble_system(const GramBlocks& blocks, const Matrix& output_weights, const Vector& output_bias,
                             const Matrix& targets, const Matrix& x, const FiringPattern& pattern, double lambda);

enum class SolverPath { none, direct, svd_clamped, reinitialized };

std::string_view to_string(SolverPath path);
SolverPath solver_path_from_string(std::string_view name);

struct HiddenSolve {
    Matrix hidden;
    SolverPath path = SolverPath::none;
};

/// Direct solve when logdet > τ, otherwise (or when the direct factorization
/// fails) the clamped SVD pseudo-solve. Block j of the solution is column j of A.
HiddenSolve solve_hidden_layer(const NormalSystem& sys, double tau, double clamp = kDefaultClamp);

/// Stacks the columns of A into a, the inverse of the reshape used above.
Vector unravel(const Matrix& hidden);
Matrix reshape_hidden(const Vector& a, Eigen::Index block_size);

}  // namespace anmin
