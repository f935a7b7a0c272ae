#pragma once

#include <array>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "fhntorus/errors.hpp"
#include "fhntorus/params.hpp"

namespace fhntorus {

// State layout
// ------------
// The 2 N^2 coordinates are the transposed columns of the cell array
// concatenated: C_beta = (x_{1,beta}, y_{1,beta}, ..., x_{N,beta}, y_{N,beta}).
// With 0-based cell indices i = alpha - 1, j = beta - 1 the flat index of
// x_{alpha,beta} is 2 (j N + i) and y_{alpha,beta} follows it.

inline int x_index(int i, int j, int n) noexcept { return 2 * (j * n + i); }
inline int y_index(int i, int j, int n) noexcept { return 2 * (j * n + i) + 1; }
inline int wrap(int i, int n) noexcept { return ((i % n) + n) % n; }

/// Real lattice state of length 2 N^2 in C_beta order.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(int n) : n_(n), data_(Eigen::VectorXd::Zero(2 * n * n)) {}
    StateVector(int n, Eigen::VectorXd data) : n_(n), data_(std::move(data)) {
        if (data_.size() != 2 * n * n)
            throw DimensionError("state length " + std::to_string(data_.size()) +
                                 " does not match 2 N^2 = " + std::to_string(2 * n * n));
    }

    /// Every cell at (x, y).
    static StateVector synchronized(int n, double x, double y) {
        StateVector z(n);
        for (int k = 0; k < n * n; ++k) {
            z.data_[2 * k] = x;
            z.data_[2 * k + 1] = y;
        }
        return z;
    }

    int n() const noexcept { return n_; }
    Eigen::Index size() const noexcept { return data_.size(); }

    // 0-based cell indices, wrapped mod N.
    double& x(int i, int j) { return data_[x_index(wrap(i, n_), wrap(j, n_), n_)]; }
    double& y(int i, int j) { return data_[y_index(wrap(i, n_), wrap(j, n_), n_)]; }
    double x(int i, int j) const { return data_[x_index(wrap(i, n_), wrap(j, n_), n_)]; }
    double y(int i, int j) const { return data_[y_index(wrap(i, n_), wrap(j, n_), n_)]; }

    Eigen::VectorXd& data() noexcept { return data_; }
    const Eigen::VectorXd& data() const noexcept { return data_; }

private:
    int n_ = 0;
    Eigen::VectorXd data_;
};

inline void require_dim(const StateVector& z, const LatticeParams& lp) {
    if (z.n() != lp.n() || z.size() != lp.dim())
        throw DimensionError("state of length " + std::to_string(z.size()) +
                             " does not fit a lattice with 2 N^2 = " + std::to_string(lp.dim()));
}

/// Single-cell vector field (x', y').
inline std::pair<double, double> rhs_cell(double x, double y, const CellParams& p) noexcept {
    return {x * (p.a - x) * (x - 1.0) - y, p.b * x - p.c * y};
}

/// d/dx of x (a - x)(x - 1).
inline double cubic_slope(double x, double a) noexcept {
    return -3.0 * x * x + 2.0 * (1.0 + a) * x - a;
}

/// Torus vector field. Writes into `out` (resized as needed).
inline void rhs_network(const Eigen::VectorXd& z, const LatticeParams& lp, Eigen::VectorXd& out) {
    const int n = lp.n();
    const double g = lp.gamma(), d = lp.delta();
    out.resize(z.size());
    for (int j = 0; j < n; ++j) {
        const int jn = (j + 1 == n) ? 0 : j + 1;
        for (int i = 0; i < n; ++i) {
            const int in = (i + 1 == n) ? 0 : i + 1;
            const int ix = x_index(i, j, n);
            const double x = z[ix], y = z[ix + 1];
            auto [fx, fy] = rhs_cell(x, y, lp.cell());
            out[ix] = fx + g * (x - z[x_index(in, j, n)]) + d * (x - z[x_index(i, jn, n)]);
            out[ix + 1] = fy;
        }
    }
}

inline StateVector rhs_network(const StateVector& z, const LatticeParams& lp) {
    require_dim(z, lp);
    Eigen::VectorXd out;
    rhs_network(z.data(), lp, out);
    return {lp.n(), std::move(out)};
}

// Jacobian
// --------

/// 2x2 building blocks of the linearisation at a synchronized point.
struct JacobianBlocks {
    Eigen::Matrix2d D;
    Eigen::Matrix2d E;  // diag(-gamma, 0), couples to cell alpha + 1
    Eigen::Matrix2d F;  // diag(-delta, 0), couples to column beta + 1
};

/// Blocks at the synchronized point (x*, y*): D = Df(x*, y*) - E - F.
inline JacobianBlocks jacobian_blocks_sync(double xs, const LatticeParams& lp) {
    JacobianBlocks blk;
    blk.E << -lp.gamma(), 0.0, 0.0, 0.0;
    blk.F << -lp.delta(), 0.0, 0.0, 0.0;
    blk.D << cubic_slope(xs, lp.a()) + lp.gamma() + lp.delta(), -1.0, lp.b(), -lp.c();
    return blk;
}

/// D = [[-a + gamma + delta, -1], [b, -c]], E = diag(-gamma, 0), F = diag(-delta, 0).
inline JacobianBlocks jacobian_blocks_origin(const LatticeParams& lp) {
    return jacobian_blocks_sync(0.0, lp);
}

/// Dense 2N^2 x 2N^2 Jacobian. When assembled at a synchronized point the
/// constituent blocks are kept: A (2N x 2N, block circulant in D, E) and
/// B (2N x 2N, block diagonal in F), with M block circulant in A, B.
struct BlockMatrix {
    Eigen::MatrixXd full;
    std::optional<JacobianBlocks> blocks;
    std::optional<Eigen::MatrixXd> A;
    std::optional<Eigen::MatrixXd> B;
};

inline BlockMatrix assemble_block_circulant(const JacobianBlocks& blk, int n) {
    const int m = 2 * n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < n; ++i) {
        A.block<2, 2>(2 * i, 2 * i) = blk.D;
        A.block<2, 2>(2 * i, 2 * ((i + 1) % n)) = blk.E;
        B.block<2, 2>(2 * i, 2 * i) = blk.F;
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * m, n * m);
    for (int j = 0; j < n; ++j) {
        M.block(j * m, j * m, m, m) = A;
        M.block(j * m, ((j + 1) % n) * m, m, m) = B;
    }
    return {std::move(M), blk, std::move(A), std::move(B)};
}

inline BlockMatrix assemble_jacobian_origin(const LatticeParams& lp) {
    return assemble_block_circulant(jacobian_blocks_origin(lp), lp.n());
}

/// Exact Jacobian of rhs_network at an arbitrary state.
inline BlockMatrix jacobian_at(const StateVector& z, const LatticeParams& lp) {
    require_dim(z, lp);
    const int n = lp.n();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(lp.dim(), lp.dim());
    bool sync = true;
    const double x0 = z.data()[0], y0 = z.data()[1];
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int ix = x_index(i, j, n);
            const double x = z.data()[ix];
            sync = sync && x == x0 && z.data()[ix + 1] == y0;
            J(ix, ix) = cubic_slope(x, lp.a()) + lp.gamma() + lp.delta();
            J(ix, ix + 1) = -1.0;
            J(ix, x_index((i + 1) % n, j, n)) += -lp.gamma();
            J(ix, x_index(i, (j + 1) % n, n)) += -lp.delta();
            J(ix + 1, ix) = lp.b();
            J(ix + 1, ix + 1) = -lp.c();
        }
    }
    BlockMatrix out;
    out.full = std::move(J);
    if (sync) {
        BlockMatrix ref = assemble_block_circulant(jacobian_blocks_sync(x0, lp), n);
        out.blocks = ref.blocks;
        out.A = std::move(ref.A);
        out.B = std::move(ref.B);
    }
    return out;
}

}  // namespace fhntorus
