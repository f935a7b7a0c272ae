#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fhntorus/model.hpp"
#include "support/gen.hpp"

using namespace fhntorus;

namespace {

LatticeParams lattice(double a, double b, double c, double g, double d, int n = 3) {
    return {{a, b, c}, {g, d}, n};
}

// Independent loop over a 2-D cell array, written from the equations.
std::vector<double> brute_rhs(const StateVector& z, const LatticeParams& lp) {
    const int n = lp.n();
    std::vector<std::vector<double>> X(n, std::vector<double>(n)), Y = X;
    for (int al = 1; al <= n; ++al)
        for (int be = 1; be <= n; ++be) {
            X[al - 1][be - 1] = z.data()[2 * ((be - 1) * n + (al - 1))];
            Y[al - 1][be - 1] = z.data()[2 * ((be - 1) * n + (al - 1)) + 1];
        }
    std::vector<double> out(lp.dim());
    for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be) {
            const double x = X[al][be], y = Y[al][be];
            const double fx = x * (lp.a() - x) * (x - 1) - y + lp.gamma() * (x - X[(al + 1) % n][be]) +
                              lp.delta() * (x - X[al][(be + 1) % n]);
            out[2 * (be * n + al)] = fx;
            out[2 * (be * n + al) + 1] = lp.b() * x - lp.c() * y;
        }
    return out;
}

Eigen::MatrixXd finite_difference_jacobian(const StateVector& z, const LatticeParams& lp, double h) {
    Eigen::MatrixXd J(lp.dim(), lp.dim());
    for (int k = 0; k < lp.dim(); ++k) {
        StateVector zp = z, zm = z;
        zp.data()[k] += h;
        zm.data()[k] -= h;
        J.col(k) = (rhs_network(zp, lp).data() - rhs_network(zm, lp).data()) / (2 * h);
    }
    return J;
}

}  // namespace

TEST(Params, AcceptsOddPrimesOnly) {
    for (int n : {3, 5, 7, 11, 13}) EXPECT_NO_THROW(lattice(0, 1, 0, 1, 1, n));
    for (int n : {-3, 0, 1, 2, 4, 9, 15, 25}) EXPECT_THROW(lattice(0, 1, 0, 1, 1, n), LatticeSizeError);
}

TEST(Params, RejectsNonFinite) {
    EXPECT_THROW(lattice(NAN, 1, 0, 1, 1), DomainError);
    EXPECT_THROW(lattice(0, 1, 0, INFINITY, 1), DomainError);
}

TEST(Params, DegenerateCouplingWarns) {
    EXPECT_EQ(coupling_warnings(lattice(0, 1, 0, 0.5, 0.5)).size(), 1u);
    EXPECT_EQ(coupling_warnings(lattice(0, 1, 0, 0.5, 0.5)).front().code, "degenerate-coupling");
    EXPECT_TRUE(coupling_warnings(lattice(0, 1, 0, 0.5, -0.5)).empty());
}

TEST(Layout, FlatIndexOfCells) {
    const int n = 5;
    for (int al = 1; al <= n; ++al)
        for (int be = 1; be <= n; ++be) {
            EXPECT_EQ(x_index(al - 1, be - 1, n), 2 * ((be - 1) * n + (al - 1)));
            EXPECT_EQ(y_index(al - 1, be - 1, n), 2 * ((be - 1) * n + (al - 1)) + 1);
        }
    StateVector z(3);
    z.x(4, -1) = 7.0;  // wraps to (1, 2)
    EXPECT_EQ(z.data()[x_index(1, 2, 3)], 7.0);
}

TEST(Layout, WrongLengthIsDimensionError) {
    EXPECT_THROW(StateVector(3, Eigen::VectorXd::Zero(17)), DimensionError);
    EXPECT_THROW(rhs_network(StateVector(5), lattice(0, 1, 0, 1, 1, 3)), DimensionError);
    EXPECT_THROW(jacobian_at(StateVector(5), lattice(0, 1, 0, 1, 1, 3)), DimensionError);
}

TEST(RhsCell, Examples) {
    const CellParams p{0.0, 1.0, 0.0};
    EXPECT_EQ(rhs_cell(0, 0, {0.3, 2.0, 0.7}), std::make_pair(0.0, 0.0));
    EXPECT_EQ(rhs_cell(1, 0, p), std::make_pair(0.0, 1.0));
    for (const CellParams q : {CellParams{0.4, 2.0, 0.1}, CellParams{-0.7, 0.5, 0.0}}) {
        auto [fx, fy] = rhs_cell(q.a, 0.0, q);
        EXPECT_EQ(fx, 0.0);
        EXPECT_DOUBLE_EQ(fy, q.b * q.a);
    }
}

TEST(RhsNetwork, OriginIsEquilibrium) {
    gen::Gen g(1);
    for (int i = 0; i < 10; ++i) {
        const auto lp = g.lattice();
        EXPECT_EQ(rhs_network(StateVector(lp.n()), lp).data().lpNorm<Eigen::Infinity>(), 0.0);
    }
}

TEST(RhsNetwork, SynchronizedStateGivesReplicatedCell) {
    const auto lp = lattice(0.2, 1.3, 0.1, -0.7, 0.4, 5);
    const auto z = StateVector::synchronized(5, 0.37, -0.21);
    const auto f = rhs_network(z, lp);
    auto [fx, fy] = rhs_cell(0.37, -0.21, lp.cell());
    for (int k = 0; k < lp.cells(); ++k) {
        EXPECT_EQ(f.data()[2 * k], fx);
        EXPECT_EQ(f.data()[2 * k + 1], fy);
    }
}

TEST(RhsNetwork, SingleExcitedCell) {
    const auto lp = lattice(0, 1, 0, 1, 0);
    StateVector z(3);
    z.x(0, 0) = 1.0;
    const auto f = rhs_network(z, lp);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(18);
    expect[x_index(0, 0, 3)] = 1.0;
    expect[x_index(2, 0, 3)] = -1.0;
    expect[y_index(0, 0, 3)] = 1.0;
    EXPECT_EQ(f.data(), expect);
}

TEST(RhsNetwork, MatchesBruteForceLoop) {
    gen::for_all(20, 100, [](gen::Gen& g) {
        const auto lp = g.lattice();
        const auto z = g.state(lp.n(), 2.0);
        const auto f = rhs_network(z, lp);
        const auto ref = brute_rhs(z, lp);
        for (int i = 0; i < lp.dim(); ++i) EXPECT_NEAR(f.data()[i], ref[i], 1e-14);
    });
}

TEST(JacobianBlocks, Examples) {
    auto blk = jacobian_blocks_origin(lattice(1, 2, 3, 4, 5));
    EXPECT_EQ(blk.D, (Eigen::Matrix2d() << 8, -1, 2, -3).finished());
    EXPECT_EQ(blk.E, (Eigen::Matrix2d() << -4, 0, 0, 0).finished());
    EXPECT_EQ(blk.F, (Eigen::Matrix2d() << -5, 0, 0, 0).finished());

    blk = jacobian_blocks_origin(lattice(0.3, 2, 0.5, 0, 0));
    EXPECT_TRUE(blk.E.isZero());
    EXPECT_TRUE(blk.F.isZero());
    EXPECT_EQ(blk.D, (Eigen::Matrix2d() << -0.3, -1, 2, -0.5).finished());

    blk = jacobian_blocks_origin(lattice(0, 1, 0, -1, -1));
    EXPECT_EQ(blk.D, (Eigen::Matrix2d() << -2, -1, 1, 0).finished());
    EXPECT_EQ(blk.E, (Eigen::Matrix2d() << 1, 0, 0, 0).finished());
    EXPECT_EQ(blk.F, (Eigen::Matrix2d() << 1, 0, 0, 0).finished());
}

TEST(AssembleJacobian, UncoupledIsBlockDiagonal) {
    const auto M = assemble_jacobian_origin(lattice(0, 1, 0, 0, 0)).full;
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(18, 18);
    for (int k = 0; k < 9; ++k) ref.block<2, 2>(2 * k, 2 * k) << 0, -1, 1, 0;
    EXPECT_EQ(M, ref);
}

TEST(AssembleJacobian, BlockStructure) {
    const auto lp = lattice(0.1, 1.5, 0.2, 0.3, -0.2, 5);
    const auto bm = assemble_jacobian_origin(lp);
    ASSERT_TRUE(bm.A && bm.B && bm.blocks);
    EXPECT_EQ(bm.full.rows(), 50);
    // x-pattern of all ones: each x row sees -a (coupling differences cancel), each y row sees b
    Eigen::VectorXd ones = StateVector::synchronized(5, 1.0, 0.0).data();
    const Eigen::VectorXd img = bm.full * ones;
    for (int k = 0; k < 25; ++k) {
        EXPECT_NEAR(img[2 * k], -lp.a(), 1e-15);
        EXPECT_NEAR(img[2 * k + 1], lp.b(), 1e-15);
    }
}

TEST(AssembleJacobian, MatchesFiniteDifferences) {
    const auto lp = lattice(0, 1, 0, 0.3, -0.2);
    const Eigen::MatrixXd fd = finite_difference_jacobian(StateVector(3), lp, 1e-5);
    EXPECT_LT((fd - assemble_jacobian_origin(lp).full).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(JacobianAt, OriginBitForBit) {
    gen::for_all(10, 200, [](gen::Gen& g) {
        const auto lp = g.lattice();
        EXPECT_EQ(jacobian_at(StateVector(lp.n()), lp).full, assemble_jacobian_origin(lp).full);
    });
}

TEST(JacobianAt, SynchronizedPointKeepsBlocks) {
    const auto lp = lattice(0.25, 1.0, 0.1, 0.6, -0.4);
    const auto z = StateVector::synchronized(3, 0.4, 0.1);
    const auto J = jacobian_at(z, lp);
    ASSERT_TRUE(J.blocks.has_value());
    EXPECT_DOUBLE_EQ(J.blocks->D(0, 0), cubic_slope(0.4, 0.25) + 0.6 - 0.4);
    EXPECT_EQ(J.full, assemble_block_circulant(*J.blocks, 3).full);
    EXPECT_LT((finite_difference_jacobian(z, lp, 1e-5) - J.full).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(JacobianAt, RandomStatesMatchFiniteDifferences) {
    gen::for_all(10, 300, [](gen::Gen& g) {
        const auto lp = g.lattice(3);
        const auto z = g.state(3);
        const auto J = jacobian_at(z, lp);
        EXPECT_FALSE(J.blocks.has_value());
        EXPECT_LT((finite_difference_jacobian(z, lp, 1e-5) - J.full).cwiseAbs().maxCoeff(), 1e-6);
    });
}
