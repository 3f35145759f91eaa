#pragma once

// Dense double-precision kernels used by the layer solvers.

#include <Eigen/Dense>

namespace anmin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kDefaultClamp = 1e-4;

/// Square system with a symmetric matrix. The matrix is replaced by (M + Mᵀ)/2
/// on construction since accumulated sums are only symmetric up to rounding.
struct SymmetricSystem {
    SymmetricSystem(Matrix m, Vector r);

    Matrix matrix;
    Vector rhs;
};

/// u * diag(d) * vᵀ, with d non-increasing and non-negative.
struct SvdFactors {
    Matrix u;
    Vector d;
    Matrix v;
};

/// Direct solve (Cholesky, then LDLᵀ). Throws SingularMatrix when neither
/// factorization yields a solution meeting the residual bound
/// ‖Mx − b‖ ≤ 1e-8 (‖M‖_F ‖x‖ + ‖b‖).
Vector solve_symmetric(const SymmetricSystem& sys);

/// General square SVD (divide and conquer).
SvdFactors svd(const Matrix& matrix);

/// SVD of a symmetric matrix through its eigendecomposition: d = |λ|, v = Q,
/// u = Q diag(sign λ). Cheaper than the general routine for the same factors.
SvdFactors symmetric_svd(const Matrix& matrix);

/// V diag(max(d, clamp))⁻¹ Uᵀ rhs.
Vector pseudo_solve(const SvdFactors& factors, const Vector& rhs, double clamp = kDefaultClamp);

/// Σ ln dᵢ over the singular values of a symmetric matrix; −∞ if any is zero.
double log_determinant(const Matrix& matrix);

/// Singular values of a symmetric matrix, sorted non-increasing.
Vector symmetric_singular_values(const Matrix& matrix);

}  // namespace anmin
