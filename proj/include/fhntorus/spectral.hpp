#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fhntorus/model.hpp"
#include "fhntorus/params.hpp"
#include "fhntorus/symmetry.hpp"

namespace fhntorus {

using cplx = std::complex<double>;

/// omega^m with omega = exp(2 pi i / N).
inline cplx root_of_unity(int m, int n) {
    return std::polar(1.0, 2.0 * std::numbers::pi * mod_n(m, n) / n);
}

/// Principal square root: branch cut on the negative real axis, Re >= 0.
/// On the cut itself (zero imaginary part of either sign) the root with
/// positive imaginary part is returned.
inline cplx principal_sqrt(cplx z) {
    if (z.imag() == 0.0) {
        if (z.real() >= 0.0) return {std::sqrt(z.real()), 0.0};
        return {0.0, std::sqrt(-z.real())};
    }
    return std::sqrt(z);
}

/// Square root from the half-angle identities
///   Re = sqrt((|eta| + a1)/2),  Im = sgn(b1) sqrt((|eta| - a1)/2),
/// valid for b1 != 0.
inline cplx sqrt_half_angle(cplx eta) {
    const double m = std::abs(eta);
    const double re = std::sqrt(std::max(0.0, (m + eta.real()) / 2.0));
    const double im = std::sqrt(std::max(0.0, (m - eta.real()) / 2.0));
    return {re, eta.imag() < 0.0 ? -im : im};
}

/// A(r, s) = -a + gamma (1 - omega^r) + delta (1 - omega^s).
inline cplx coupling_symbol(int r, int s, const LatticeParams& lp) {
    return -lp.a() + lp.gamma() * (1.0 - root_of_unity(r, lp.n())) +
           lp.delta() * (1.0 - root_of_unity(s, lp.n()));
}

enum class Branch { plus, minus };

inline const char* to_string(Branch b) noexcept { return b == Branch::plus ? "+" : "-"; }

/// Eigenvalues of the 2x2 block D + omega^r E + omega^s F:
///   lambda_{+/-} = ( (A - c) +/- sqrt((A + c)^2 - 4 b) ) / 2.
inline std::pair<cplx, cplx> analytic_eigenvalues(int r, int s, const LatticeParams& lp) {
    const cplx A = coupling_symbol(r, s, lp);
    const double c = lp.c();
    const cplx root = principal_sqrt((A + c) * (A + c) - 4.0 * lp.b());
    return {0.5 * (A - c + root), 0.5 * (A - c - root)};
}

inline cplx analytic_eigenvalue(int r, int s, Branch br, const LatticeParams& lp) {
    auto [p, m] = analytic_eigenvalues(r, s, lp);
    return br == Branch::plus ? p : m;
}

/// Eigenvalues of the uncoupled cell linearisation at the origin,
/// ( -(a + c) +/- sqrt((c - a)^2 - 4 b) ) / 2.
inline std::pair<cplx, cplx> uncoupled_eigenvalues(const CellParams& p) {
    const cplx root = principal_sqrt(cplx((p.c - p.a) * (p.c - p.a) - 4.0 * p.b, 0.0));
    return {0.5 * (-(p.a + p.c) + root), 0.5 * (-(p.a + p.c) - root)};
}

/// Xi(r, s, v) = Omega(s, Omega(r, v)) with v = (1, A - lambda), the
/// eigenvector of the 2x2 block normalised so the first x component is 1.
inline Eigen::VectorXcd analytic_eigenvector(int r, int s, Branch br, const LatticeParams& lp) {
    const int n = lp.n();
    const cplx A = coupling_symbol(r, s, lp);
    const cplx lam = analytic_eigenvalue(r, s, br, lp);
    const cplx v0 = 1.0, v1 = A - lam;
    Eigen::VectorXcd xi(lp.dim());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const cplx ph = root_of_unity(i * r + j * s, n);
            const int ix = x_index(i, j, n);
            xi[ix] = ph * v0;
            xi[ix + 1] = ph * v1;
        }
    return xi;
}

/// |M xi - lambda xi|_inf / |xi|_inf.
inline double eigen_residual(const Eigen::MatrixXd& M, cplx lambda, const Eigen::VectorXcd& xi) {
    const Eigen::VectorXcd r = M.cast<cplx>() * xi - lambda * xi;
    return r.cwiseAbs().maxCoeff() / xi.cwiseAbs().maxCoeff();
}

struct EigenRecord {
    int r = 0;
    int s = 0;
    Branch branch = Branch::plus;
    cplx lambda;
    Eigen::VectorXcd eigenvector;
    double residual = 0.0;
    ModeIndex component;    // canonical k of the isotypic component
    bool repeated = false;  // coincides with an eigenvalue of another (r,s)
};

struct SpectrumOptions {
    double residual_tol = 1e-10;
    double repeat_tol = 1e-9;  // relative to max(1, |lambda|)
    bool keep_vectors = true;
};

struct SpectrumReport {
    std::vector<EigenRecord> records;
    double max_residual = 0.0;
    bool residuals_ok = true;
    bool any_repeated = false;
};

/// All 2 N^2 eigenpairs of the origin linearisation, grouped by isotypic
/// component: for each k in I the records of k and then of N - k, each with
/// branches + and -. Residuals are checked against the assembled matrix.
inline SpectrumReport spectrum_report(const LatticeParams& lp, const SpectrumOptions& opt = {}) {
    const int n = lp.n();
    const Eigen::MatrixXcd M = assemble_jacobian_origin(lp).full.cast<cplx>();
    SpectrumReport rep;
    rep.records.reserve(lp.dim());
    for (const auto& k : mode_index_set(n)) {
        std::vector<std::pair<int, int>> members{{k.k1, k.k2}};
        if (k.type != 1) members.emplace_back(mod_n(n - k.k1, n), mod_n(n - k.k2, n));
        for (auto [r, s] : members)
            for (Branch br : {Branch::plus, Branch::minus}) {
                EigenRecord rec;
                rec.r = r;
                rec.s = s;
                rec.branch = br;
                rec.lambda = analytic_eigenvalue(r, s, br, lp);
                rec.component = k;
                Eigen::VectorXcd xi = analytic_eigenvector(r, s, br, lp);
                const Eigen::VectorXcd res = M * xi - rec.lambda * xi;
                rec.residual = res.cwiseAbs().maxCoeff() / xi.cwiseAbs().maxCoeff();
                if (opt.keep_vectors) rec.eigenvector = std::move(xi);
                rep.max_residual = std::max(rep.max_residual, rec.residual);
                rep.records.push_back(std::move(rec));
            }
    }
    rep.residuals_ok = rep.max_residual <= opt.residual_tol;
    for (auto& a : rep.records)
        for (const auto& b : rep.records) {
            if (a.r == b.r && a.s == b.s) continue;
            const double scale = std::max(1.0, std::abs(a.lambda));
            if (std::abs(a.lambda - b.lambda) <= opt.repeat_tol * scale) {
                a.repeated = true;
                rep.any_repeated = true;
                break;
            }
        }
    return rep;
}

/// Unordered pair of distinct modes whose characteristic polynomials coincide.
struct ModePair {
    int r = 0, s = 0, rt = 0, st = 0;
};

/// Pairs (r,s) != (r~,s~) with gamma (omega^r - omega^r~) = delta (omega^s~ - omega^s),
/// i.e. A(r,s) = A(r~,s~), within an absolute tolerance.
inline std::vector<ModePair> genericity_violations(const LatticeParams& lp, double tol = 1e-12) {
    const int n = lp.n();
    std::vector<std::pair<int, int>> modes;
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) modes.emplace_back(r, s);
    std::vector<ModePair> out;
    for (std::size_t p = 0; p < modes.size(); ++p)
        for (std::size_t q = p + 1; q < modes.size(); ++q) {
            auto [r, s] = modes[p];
            auto [rt, st] = modes[q];
            const cplx lhs = lp.gamma() * (root_of_unity(r, n) - root_of_unity(rt, n));
            const cplx rhs = lp.delta() * (root_of_unity(st, n) - root_of_unity(s, n));
            if (std::abs(lhs - rhs) <= tol) out.push_back({r, s, rt, st});
        }
    return out;
}

/// Largest real part over the whole analytic spectrum, with its mode.
struct LeadingEigenvalue {
    int r = 0;
    int s = 0;
    Branch branch = Branch::plus;
    cplx lambda;
};

inline LeadingEigenvalue leading_eigenvalue(const LatticeParams& lp) {
    LeadingEigenvalue best;
    best.lambda = cplx(-INFINITY, 0.0);
    const int n = lp.n();
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            auto [p, m] = analytic_eigenvalues(r, s, lp);
            for (auto [lam, br] : {std::pair{p, Branch::plus}, std::pair{m, Branch::minus}}) {
                const bool better =
                    lam.real() > best.lambda.real() ||
                    (lam.real() == best.lambda.real() && lam.imag() > best.lambda.imag());
                if (better) best = {r, s, br, lam};
            }
        }
    return best;
}

inline double max_real_part(const LatticeParams& lp) { return leading_eigenvalue(lp).lambda.real(); }

}  // namespace fhntorus
