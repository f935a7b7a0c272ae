#pragma once

#include <cmath>
#include <string>

#include "fhntorus/errors.hpp"

namespace fhntorus {

/// Constants of a single FitzHugh-Nagumo cell:
///   x' = x (a - x)(x - 1) - y,   y' = b x - c y.
struct CellParams {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
};

/// Unidirectional coupling strengths. gamma couples x_{alpha,beta} to
/// x_{alpha+1,beta}; delta couples it to x_{alpha,beta+1}.
struct CouplingParams {
    double gamma = 0.0;
    double delta = 0.0;

    bool degenerate() const noexcept { return gamma == delta; }
};

inline bool is_prime(int n) noexcept {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline bool is_odd_prime(int n) noexcept { return n >= 3 && is_prime(n); }

/// Full parameter set of the N x N torus. N is validated as an odd prime.
class LatticeParams {
public:
    LatticeParams(CellParams cell, CouplingParams coupling, int n)
        : cell_(cell), coupling_(coupling), n_(n) {
        if (!is_odd_prime(n))
            throw LatticeSizeError("lattice size N must be an odd prime >= 3, got " +
                                   std::to_string(n));
        if (!std::isfinite(cell.a) || !std::isfinite(cell.b) || !std::isfinite(cell.c) ||
            !std::isfinite(coupling.gamma) || !std::isfinite(coupling.delta))
            throw DomainError("lattice parameters must be finite");
    }

    const CellParams& cell() const noexcept { return cell_; }
    const CouplingParams& coupling() const noexcept { return coupling_; }
    int n() const noexcept { return n_; }

    double a() const noexcept { return cell_.a; }
    double b() const noexcept { return cell_.b; }
    double c() const noexcept { return cell_.c; }
    double gamma() const noexcept { return coupling_.gamma; }
    double delta() const noexcept { return coupling_.delta; }

    /// Number of cells, N^2.
    int cells() const noexcept { return n_ * n_; }
    /// Phase-space dimension, 2 N^2.
    int dim() const noexcept { return 2 * n_ * n_; }

    LatticeParams with_a(double a) const {
        CellParams p = cell_;
        p.a = a;
        return {p, coupling_, n_};
    }
    LatticeParams with_c(double c) const {
        CellParams p = cell_;
        p.c = c;
        return {p, coupling_, n_};
    }
    LatticeParams with_coupling(CouplingParams k) const { return {cell_, k, n_}; }

private:
    CellParams cell_;
    CouplingParams coupling_;
    int n_;
};

/// Warning list for bifurcation-facing calls. gamma == delta is admitted
/// but degenerate.
inline Warnings coupling_warnings(const LatticeParams& lp) {
    Warnings w;
    if (lp.coupling().degenerate())
        w.push_back({"degenerate-coupling",
                     "gamma == delta is a degenerate coupling; eigenvalues of distinct modes "
                     "may coincide"});
    return w;
}

}  // namespace fhntorus
