#include "anmin/layer_solvers.hpp"

#include "anmin/error.hpp"

#include <algorithm>
#include <string>
#include <thread>
#include <vector>

namespace anmin {

namespace {

bool columns_ok(const Matrix& m, const Matrix& x, const Matrix& b) {
    if (!x.allFinite()) return false;
    const double mn = m.norm();
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
        const double res = (m * x.col(k) - b.col(k)).norm();
        if (res > 1e-8 * (mn * x.col(k).norm() + b.col(k).norm())) return false;
    }
    return true;
}

// Adds Σ_{i in [begin, end)} wᵢ wᵢᵀ into the lower triangle of `acc`, where
// wᵢ stacks G_ij x̃ᵢ over the units j.
void accumulate_range(const Matrix& x, const Matrix& blend, Eigen::Index begin, Eigen::Index end, Eigen::Index batch,
                      Matrix& acc) {
    const Eigen::Index p = x.cols();
    const Eigen::Index h = blend.cols();
    Matrix w;
    for (Eigen::Index start = begin; start < end; start += batch) {
        const Eigen::Index rows = std::min(batch, end - start);
        w.resize(rows, p * h);
        for (Eigen::Index j = 0; j < h; ++j)
            w.middleCols(j * p, p) = blend.col(j).segment(start, rows).asDiagonal() * x.middleRows(start, rows);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(w.transpose());
    }
}

}  // namespace

OutputFit fit_output_layer(const Matrix& features, const Matrix& targets, double lambda) {
    if (features.rows() != targets.rows())
        throw DimensionMismatch("features have " + std::to_string(features.rows()) + " rows, targets " +
                                std::to_string(targets.rows()));
    if (features.rows() < 1) throw DataError("output-layer fit needs at least one row");
    const double n = static_cast<double>(features.rows());
    const Eigen::Index q = features.cols();

    Matrix gram = Matrix::Zero(q, q);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose(), 1.0 / n);
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += lambda;
    const Matrix rhs = features.transpose() * targets / n;

    Matrix beta;
    bool solved = false;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) {
        beta = llt.solve(rhs);
        solved = columns_ok(gram, beta, rhs);
    }
    if (!solved) {
        Eigen::LDLT<Matrix> ldlt(gram);
        if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() != 0.0).all()) {
            beta = ldlt.solve(rhs);
            solved = columns_ok(gram, beta, rhs);
        }
    }
    if (!solved) throw SingularMatrix("output-layer normal equations are singular (lambda = " +
                                      std::to_string(lambda) + ")");

    return OutputFit{beta.topRows(q - 1), beta.row(q - 1).transpose()};
}

GramBlocks::GramBlocks(Matrix full, Eigen::Index block_size) : full_(std::move(full)), block_size_(block_size) {
    if (block_size_ < 1 || full_.rows() != full_.cols() || full_.rows() % block_size_ != 0)
        throw DimensionMismatch("gram matrix of order " + std::to_string(full_.rows()) +
                                " is not a grid of blocks of size " + std::to_string(block_size_));
}

GramBlocks accumulate_gram(const Matrix& x, const FiringPattern& pattern, int batch, int workers) {
    if (batch < 1) throw ConfigError("accumulation batch must be positive");
    if (pattern.blend.rows() != x.rows())
        throw DimensionMismatch("pattern has " + std::to_string(pattern.blend.rows()) + " rows, design " +
                                std::to_string(x.rows()));
    const Eigen::Index n = x.rows();
    const Eigen::Index order = x.cols() * pattern.blend.cols();
    const Eigen::Index b = batch;
    const Eigen::Index batches = (n + b - 1) / b;
    const Eigen::Index used = std::clamp<Eigen::Index>(workers, 1, std::max<Eigen::Index>(batches, 1));

    Matrix total = Matrix::Zero(order, order);
    if (used == 1) {
        accumulate_range(x, pattern.blend, 0, n, b, total);
    } else {
        std::vector<Matrix> partial(static_cast<std::size_t>(used), Matrix::Zero(order, order));
        std::vector<std::thread> pool;
        for (Eigen::Index w = 0; w < used; ++w) {
            const Eigen::Index first = batches * w / used;
            const Eigen::Index last = batches * (w + 1) / used;
            pool.emplace_back([&, w, first, last] {
                accumulate_range(x, pattern.blend, first * b, std::min(last * b, n), b,
                                 partial[static_cast<std::size_t>(w)]);
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& part : partial) total.triangularView<Eigen::Lower>() += part;
    }
    total /= static_cast<double>(n);
    Matrix full = total.selfadjointView<Eigen::Lower>();
    return GramBlocks(std::move(full), x.cols());
}

NormalSystem assemble_system(const GramBlocks& blocks, const Matrix& output_weights, const Vector& output_bias,
                             const Matrix& targets, const Matrix& x, const FiringPattern& pattern, double lambda) {
    const Eigen::Index p = blocks.block_size();
    const Eigen::Index h = blocks.units();
    if (p != x.cols()) throw DimensionMismatch("gram block size differs from design width");
    if (output_weights.rows() != h || output_weights.cols() != output_bias.size() ||
        targets.cols() != output_bias.size())
        throw DimensionMismatch("output weights, biases and targets are inconsistent with " + std::to_string(h) +
                                " hidden units");
    if (targets.rows() != x.rows() || pattern.blend.rows() != x.rows() || pattern.blend.cols() != h)
        throw DimensionMismatch("targets, design and firing pattern row counts differ");

    const Matrix coupling = output_weights * output_weights.transpose();  // Σ_k b_jk b_lk
    NormalSystem sys;
    sys.block_size = p;
    sys.m.resize(p * h, p * h);
    for (Eigen::Index l = 0; l < h; ++l)
        for (Eigen::Index j = 0; j < h; ++j) sys.m.block(j * p, l * p, p, p) = coupling(j, l) * blocks.block(j, l);
    sys.m.diagonal().array() += lambda;

    Matrix residual = targets;
    residual.rowwise() -= output_bias.transpose();
    const Matrix weighted = pattern.blend.cwiseProduct(residual * output_weights.transpose());  // N×h
    const Matrix rhs = x.transpose() * weighted / static_cast<double>(x.rows());               // (d+1)×h
    sys.rhs = unravel(rhs);
    sys.logdet = log_determinant(sys.m);
    return sys;
}

std::string_view to_string(SolverPath path) {
    switch (path) {
        case SolverPath::none: return "none";
        case SolverPath::direct: return "direct";
        case SolverPath::svd_clamped: return "svd-clamped";
        case SolverPath::reinitialized: return "reinitialized";
    }
    return "none";
}

SolverPath solver_path_from_string(std::string_view name) {
    if (name == "direct") return SolverPath::direct;
    if (name == "svd-clamped") return SolverPath::svd_clamped;
    if (name == "reinitialized") return SolverPath::reinitialized;
    if (name == "none") return SolverPath::none;
    throw DataError("unknown solver path '" + std::string(name) + "'");
}

HiddenSolve solve_hidden_layer(const NormalSystem& sys, double tau, double clamp) {
    if (sys.block_size < 1 || sys.m.rows() % sys.block_size != 0)
        throw DimensionMismatch("normal system order is not a multiple of the block size");
    if (sys.logdet > tau) {
        try {
            Vector a = solve_symmetric(SymmetricSystem(sys.m, sys.rhs));
            return HiddenSolve{reshape_hidden(a, sys.block_size), SolverPath::direct};
        } catch (const SingularMatrix&) {
            // fall through to the clamped pseudo-solve
        }
    }
    const SvdFactors f = symmetric_svd(0.5 * (sys.m + sys.m.transpose()));
    Vector a = pseudo_solve(f, sys.rhs, clamp);
    return HiddenSolve{reshape_hidden(a, sys.block_size), SolverPath::svd_clamped};
}

Vector unravel(const Matrix& hidden) { return Eigen::Map<const Vector>(hidden.data(), hidden.size()); }

Matrix reshape_hidden(const Vector& a, Eigen::Index block_size) {
    if (block_size < 1 || a.size() % block_size != 0)
        throw DimensionMismatch("vector of length " + std::to_string(a.size()) + " does not split into blocks of " +
                                std::to_string(block_size));
    return Eigen::Map<const Matrix>(a.data(), block_size, a.size() / block_size);
}

}  // namespace anmin
