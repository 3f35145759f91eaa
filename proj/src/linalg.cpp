#include "anmin/linalg.hpp"

#include "anmin/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace anmin {

namespace {

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

bool residual_ok(const Matrix& m, const Vector& x, const Vector& b) {
    if (!x.allFinite()) return false;
    const double res = (m * x - b).norm();
    return res <= 1e-8 * (m.norm() * x.norm() + b.norm());
}

}  // namespace

SymmetricSystem::SymmetricSystem(Matrix m, Vector r) : matrix(std::move(m)), rhs(std::move(r)) {
    require_square(matrix, "SymmetricSystem");
    if (matrix.rows() != rhs.size())
        throw DimensionMismatch("SymmetricSystem: matrix order " + std::to_string(matrix.rows()) +
                                " vs rhs length " + std::to_string(rhs.size()));
    Matrix sym = 0.5 * (matrix + matrix.transpose());
    matrix = std::move(sym);
}

Vector solve_symmetric(const SymmetricSystem& sys) {
    Eigen::LLT<Matrix> llt(sys.matrix);
    if (llt.info() == Eigen::Success) {
        Vector x = llt.solve(sys.rhs);
        if (residual_ok(sys.matrix, x, sys.rhs)) return x;
    }
    Eigen::LDLT<Matrix> ldlt(sys.matrix);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() != 0.0).all()) {
        Vector x = ldlt.solve(sys.rhs);
        if (residual_ok(sys.matrix, x, sys.rhs)) return x;
    }
    throw SingularMatrix("symmetric factorization failed for system of order " +
                         std::to_string(sys.matrix.rows()));
}

SvdFactors svd(const Matrix& matrix) {
    require_square(matrix, "svd");
    require_finite(matrix, "svd");
    Eigen::BDCSVD<Matrix> dc(matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (dc.info() != Eigen::Success) throw NoConvergence("svd did not converge");
    SvdFactors f{dc.matrixU(), dc.singularValues(), dc.matrixV()};
    if (!f.d.allFinite()) throw NoConvergence("svd produced non-finite singular values");
    return f;
}

SvdFactors symmetric_svd(const Matrix& matrix) {
    require_square(matrix, "symmetric_svd");
    require_finite(matrix, "symmetric_svd");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix);
    if (es.info() != Eigen::Success) throw NoConvergence("eigendecomposition did not converge");

    const Vector& lam = es.eigenvalues();
    const Eigen::Index n = lam.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(lam(a)) > std::abs(lam(b)); });

    SvdFactors f{Matrix(n, n), Vector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        const double value = lam(src);
        f.d(k) = std::abs(value);
        f.v.col(k) = es.eigenvectors().col(src);
        f.u.col(k) = value < 0.0 ? Vector(-es.eigenvectors().col(src)) : Vector(es.eigenvectors().col(src));
    }
    return f;
}

Vector pseudo_solve(const SvdFactors& factors, const Vector& rhs, double clamp) {
    if (!(clamp > 0.0)) throw ConfigError("pseudo_solve: clamp must be positive");
    const Eigen::Index n = factors.d.size();
    if (factors.u.cols() != n || factors.v.cols() != n || factors.u.rows() != rhs.size())
        throw DimensionMismatch("pseudo_solve: factors of order " + std::to_string(n) + " vs rhs length " +
                                std::to_string(rhs.size()));
    Vector coeff = factors.u.transpose() * rhs;
    for (Eigen::Index i = 0; i < n; ++i) coeff(i) /= std::max(factors.d(i), clamp);
    return factors.v * coeff;
}

Vector symmetric_singular_values(const Matrix& matrix) {
    require_square(matrix, "log_determinant");
    require_finite(matrix, "log_determinant");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NoConvergence("eigenvalue iteration did not converge");
    Vector d = es.eigenvalues().cwiseAbs();
    std::sort(d.data(), d.data() + d.size(), std::greater<>());
    return d;
}

double log_determinant(const Matrix& matrix) {
    const Vector d = symmetric_singular_values(matrix);
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) == 0.0) return -std::numeric_limits<double>::infinity();
        total += std::log(d(i));
    }
    return total;
}

}  // namespace anmin
