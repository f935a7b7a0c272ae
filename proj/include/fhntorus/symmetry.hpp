#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhntorus/errors.hpp"
#include "fhntorus/model.hpp"

namespace fhntorus {

// Z_N x Z_N acting on the torus
// -----------------------------
// (r, s) = gamma_1^r gamma_2^s, with gamma_1 cycling the alpha index and
// gamma_2 the beta index: ((r,s) z)_{alpha,beta} = z_{alpha+r, beta+s}.
// With this convention (r,s) rotates V_k by the angle 2 pi (r,s).k / N.

inline int mod_n(long long v, int n) noexcept { return static_cast<int>(((v % n) + n) % n); }

/// Multiplicative inverse mod a prime n (v != 0 mod n).
inline int inverse_mod(int v, int n) {
    v = mod_n(v, n);
    if (v == 0) throw DomainError("zero has no inverse mod N");
    for (int w = 1; w < n; ++w)
        if ((static_cast<long long>(v) * w) % n == 1) return w;
    throw DomainError("no inverse mod N (N not prime?)");
}

struct GroupElement {
    int r = 0;
    int s = 0;

    GroupElement() = default;
    GroupElement(int r_, int s_, int n) : r(mod_n(r_, n)), s(mod_n(s_, n)) {}

    bool is_identity() const noexcept { return r == 0 && s == 0; }
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement compose(const GroupElement& g, const GroupElement& h, int n) {
    return {g.r + h.r, g.s + h.s, n};
}

inline GroupElement power(const GroupElement& g, int m, int n) {
    return {static_cast<int>(static_cast<long long>(g.r) * m % n),
            static_cast<int>(static_cast<long long>(g.s) * m % n), n};
}

/// (r,s).(k1,k2) mod N.
inline int pairing(int r, int s, int k1, int k2, int n) noexcept {
    return mod_n(static_cast<long long>(r) * k1 + static_cast<long long>(s) * k2, n);
}

inline std::vector<GroupElement> group_elements(int n) {
    std::vector<GroupElement> out;
    out.reserve(n * n);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) out.emplace_back(r, s, n);
    return out;
}

/// Apply a group element to a lattice state. Exact permutation.
inline StateVector act(const GroupElement& g, const StateVector& z) {
    const int n = z.n();
    if (z.size() != 2 * n * n) throw DimensionError("state length is not 2 N^2");
    StateVector out(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int src = x_index((i + g.r) % n, (j + g.s) % n, n);
            const int dst = x_index(i, j, n);
            out.data()[dst] = z.data()[src];
            out.data()[dst + 1] = z.data()[src + 1];
        }
    return out;
}

/// Same permutation on an N^2 pattern indexed i + j N.
inline Eigen::VectorXd act_pattern(const GroupElement& g, const Eigen::VectorXd& p, int n) {
    Eigen::VectorXd out(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out[i + j * n] = p[(i + g.r) % n + ((j + g.s) % n) * n];
    return out;
}

// Subgroups
// ---------
// N prime: the only subgroups are the trivial group, the cyclic groups of
// order N generated by one nonzero element, and the whole group.

class Subgroup {
public:
    enum class Kind { trivial, cyclic, full };

    static Subgroup trivial(int n) { return Subgroup(Kind::trivial, {}, n); }
    static Subgroup full(int n) { return Subgroup(Kind::full, {}, n); }

    /// Cyclic subgroup generated by g, stored with its canonical generator
    /// (first nonzero coordinate equal to 1).
    static Subgroup cyclic(GroupElement g, int n) {
        if (g.is_identity()) throw ClassificationError("cyclic subgroup needs a nonzero generator");
        GroupElement canon = g.r != 0 ? power(g, inverse_mod(g.r, n), n)
                                      : power(g, inverse_mod(g.s, n), n);
        return Subgroup(Kind::cyclic, canon, n);
    }

    /// Subgroup equal to the given element set; throws when the set is not one.
    static Subgroup from_elements(const std::set<GroupElement>& elems, int n) {
        const auto size = elems.size();
        if (size == 1 && elems.begin()->is_identity()) return trivial(n);
        if (size == static_cast<std::size_t>(n) * n) return full(n);
        if (size == static_cast<std::size_t>(n)) {
            for (const auto& g : elems) {
                if (g.is_identity()) continue;
                Subgroup h = cyclic(g, n);
                if (h.elements_set() == elems) return h;
                break;
            }
        }
        throw ClassificationError("element set of size " + std::to_string(size) +
                                  " is not a subgroup of Z_N x Z_N");
    }

    Kind kind() const noexcept { return kind_; }
    int n() const noexcept { return n_; }
    const GroupElement& generator() const noexcept { return gen_; }

    std::size_t order() const noexcept {
        switch (kind_) {
            case Kind::trivial: return 1;
            case Kind::cyclic: return static_cast<std::size_t>(n_);
            case Kind::full: return static_cast<std::size_t>(n_) * n_;
        }
        return 0;
    }

    bool contains(const GroupElement& g) const noexcept {
        switch (kind_) {
            case Kind::trivial: return g.is_identity();
            case Kind::full: return true;
            case Kind::cyclic:
                // g lies on the line through gen: det[gen; g] = 0 mod N
                return mod_n(static_cast<long long>(gen_.r) * g.s -
                                 static_cast<long long>(gen_.s) * g.r,
                             n_) == 0;
        }
        return false;
    }

    std::vector<GroupElement> elements() const {
        std::vector<GroupElement> out;
        for (const auto& g : group_elements(n_))
            if (contains(g)) out.push_back(g);
        return out;
    }

    std::set<GroupElement> elements_set() const {
        auto e = elements();
        return {e.begin(), e.end()};
    }

    /// Generators used to report phases: (1,0),(0,1) for the full group.
    std::vector<GroupElement> generators() const {
        switch (kind_) {
            case Kind::trivial: return {};
            case Kind::cyclic: return {gen_};
            case Kind::full: return {GroupElement(1, 0, n_), GroupElement(0, 1, n_)};
        }
        return {};
    }

    /// "1", "Gamma" or "Z(r,s)".
    std::string to_string() const {
        switch (kind_) {
            case Kind::trivial: return "1";
            case Kind::full: return "Gamma";
            case Kind::cyclic:
                return "Z(" + std::to_string(gen_.r) + "," + std::to_string(gen_.s) + ")";
        }
        return "?";
    }

    bool is_subgroup_of(const Subgroup& other) const {
        for (const auto& g : elements())
            if (!other.contains(g)) return false;
        return true;
    }

    friend bool operator==(const Subgroup& a, const Subgroup& b) {
        return a.kind_ == b.kind_ && a.n_ == b.n_ && a.gen_ == b.gen_;
    }

private:
    Subgroup(Kind k, GroupElement g, int n) : kind_(k), gen_(g), n_(n) {}

    Kind kind_;
    GroupElement gen_;
    int n_;
};

/// Parse "1", "Gamma" or "Z(r,s)".
inline Subgroup parse_subgroup(const std::string& text, int n) {
    if (text == "1" || text == "trivial") return Subgroup::trivial(n);
    if (text == "Gamma" || text == "full") return Subgroup::full(n);
    int r = 0, s = 0;
    if (std::sscanf(text.c_str(), "Z(%d,%d)", &r, &s) == 2) return Subgroup::cyclic({r, s, n}, n);
    throw ValidationError("cannot parse subgroup '" + text + "' (expected 1, Gamma or Z(r,s))");
}

// Irreducible subspaces V_k
// -------------------------

/// Label of an irreducible subspace V_k of R^{N^2}, k in the canonical set I.
struct ModeIndex {
    int k1 = 0;
    int k2 = 0;
    int type = 1;  // row of the classification table, 1..5
    int dim = 1;

    friend bool operator==(const ModeIndex& a, const ModeIndex& b) {
        return a.k1 == b.k1 && a.k2 == b.k2;
    }
};

/// Type 1..5 when (k1,k2) is in I, 0 otherwise.
inline int mode_type(int k1, int k2, int n) noexcept {
    const int h = (n - 1) / 2;
    if (k1 == 0 && k2 == 0) return 1;
    if (k1 == 0 && k2 >= 1 && k2 <= h) return 2;
    if (k2 == 0 && k1 >= 1 && k1 <= h) return 3;
    if (k1 == k2 && k1 >= 1 && k1 <= h) return 4;
    if (k2 >= 1 && k2 < k1 && k1 <= n - 1) return 5;
    return 0;
}

/// Representative in I of V_k, using V_k = V_{N-k}.
inline ModeIndex canonical_mode(int k1, int k2, int n) {
    k1 = mod_n(k1, n);
    k2 = mod_n(k2, n);
    int t = mode_type(k1, k2, n);
    if (t == 0) {
        k1 = mod_n(-k1, n);
        k2 = mod_n(-k2, n);
        t = mode_type(k1, k2, n);
    }
    return {k1, k2, t, t == 1 ? 1 : 2};
}

inline ModeIndex make_mode(int k1, int k2, int n) {
    const int t = mode_type(k1, k2, n);
    if (t == 0)
        throw DomainError("mode (" + std::to_string(k1) + "," + std::to_string(k2) +
                          ") is not in the canonical index set");
    return {k1, k2, t, t == 1 ? 1 : 2};
}

/// The canonical index set I, ordered by type.
inline std::vector<ModeIndex> mode_index_set(int n) {
    if (!is_odd_prime(n)) throw LatticeSizeError("N must be an odd prime >= 3");
    const int h = (n - 1) / 2;
    std::vector<ModeIndex> out{{0, 0, 1, 1}};
    for (int k = 1; k <= h; ++k) out.push_back({0, k, 2, 2});
    for (int k = 1; k <= h; ++k) out.push_back({k, 0, 3, 2});
    for (int k = 1; k <= h; ++k) out.push_back({k, k, 4, 2});
    for (int k1 = 2; k1 <= n - 1; ++k1)
        for (int k2 = 1; k2 < k1; ++k2) out.push_back({k1, k2, 5, 2});
    return out;
}

/// Phase 2 pi (alpha, beta).k / N with 1-based alpha, beta.
inline double mode_phase(int i, int j, int k1, int k2, int n) {
    return 2.0 * std::numbers::pi * pairing(i + 1, j + 1, k1, k2, n) / n;
}

/// Orthonormal basis of V_k in R^{N^2} (pattern index i + j N): the real
/// patterns for z = 1 and z = -i, i.e. cos and sin of the mode phase.
inline std::vector<Eigen::VectorXd> mode_basis(const ModeIndex& k, int n) {
    if (mode_type(k.k1, k.k2, n) == 0) throw DomainError("mode is not in the canonical index set");
    Eigen::VectorXd c(n * n), s(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double ph = mode_phase(i, j, k.k1, k.k2, n);
            c[i + j * n] = std::cos(ph);
            s[i + j * n] = std::sin(ph);
        }
    if (k.k1 == 0 && k.k2 == 0) return {c.normalized()};
    return {c.normalized(), s.normalized()};
}

/// Embed an N^2 pattern into the x slots (slot 0) or y slots (slot 1).
inline StateVector embed_pattern(const Eigen::VectorXd& p, int n, int slot) {
    StateVector z(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) z.data()[x_index(i, j, n) + slot] = p[i + j * n];
    return z;
}

inline Eigen::VectorXd extract_pattern(const StateVector& z, int slot) {
    const int n = z.n();
    Eigen::VectorXd p(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) p[i + j * n] = z.data()[x_index(i, j, n) + slot];
    return p;
}

/// Orthonormal basis (2 dim vectors) of the isotypic component Z_k = V_k + V_k.
inline std::vector<StateVector> isotypic_basis(const ModeIndex& k, int n) {
    std::vector<StateVector> out;
    for (int slot = 0; slot < 2; ++slot)
        for (const auto& p : mode_basis(k, n)) out.push_back(embed_pattern(p, n, slot));
    return out;
}

/// Orthogonal projection onto Z_k, from the discrete Fourier coefficient of
/// the x and y patterns at k (and at -k, its conjugate).
inline StateVector project_isotypic(const StateVector& z, const ModeIndex& k) {
    const int n = z.n();
    const ModeIndex kc = canonical_mode(k.k1, k.k2, n);
    StateVector out(n);
    const double inv = 1.0 / (static_cast<double>(n) * n);
    for (int slot = 0; slot < 2; ++slot) {
        std::complex<double> coef{0.0, 0.0};
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                coef += z.data()[x_index(i, j, n) + slot] *
                        std::polar(1.0, -mode_phase(i, j, kc.k1, kc.k2, n));
        const double scale = (kc.k1 == 0 && kc.k2 == 0) ? inv : 2.0 * inv;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                out.data()[x_index(i, j, n) + slot] =
                    scale * (coef * std::polar(1.0, mode_phase(i, j, kc.k1, kc.k2, n))).real();
    }
    return out;
}

/// Modes k in I with V_k inside Fix(<g>), i.e. k.g = 0 mod N.
inline std::vector<ModeIndex> fix_modes(const GroupElement& g, int n) {
    if (g.is_identity()) throw DomainError("Fix of the identity is the whole space");
    std::vector<ModeIndex> out;
    for (const auto& k : mode_index_set(n))
        if (pairing(g.r, g.s, k.k1, k.k2, n) == 0) out.push_back(k);
    return out;
}

/// Orthogonal projection onto Fix(K): the average over the elements of K.
inline StateVector project_fix(const Subgroup& K, const StateVector& z) {
    const auto elems = K.elements();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(z.size());
    for (const auto& g : elems) acc += act(g, z).data();
    acc /= static_cast<double>(elems.size());
    return {z.n(), std::move(acc)};
}

/// Relative distance of z from Fix(K).
inline double fix_residual(const Subgroup& K, const StateVector& z) {
    const double nz = z.data().norm();
    if (nz == 0.0) return 0.0;
    return (z.data() - project_fix(K, z).data()).norm() / nz;
}

/// Isotropy subgroup of z: elements g with |g z - z| <= tol |z|.
inline Subgroup isotropy_of(const StateVector& z, double tol = 1e-9) {
    const int n = z.n();
    const double nz = z.data().norm();
    std::set<GroupElement> fixing;
    for (const auto& g : group_elements(n))
        if ((act(g, z).data() - z.data()).norm() <= tol * nz) fixing.insert(g);
    if (fixing.size() == static_cast<std::size_t>(n) * n) return Subgroup::full(n);
    if (fixing.size() == 1) return Subgroup::trivial(n);
    // Tolerance can admit a non-closed set only when it is too loose; the
    // cyclic group generated by any fixing element is the answer for exact data.
    for (const auto& g : fixing)
        if (!g.is_identity()) {
            Subgroup h = Subgroup::cyclic(g, n);
            if (fixing.size() > h.order()) return Subgroup::full(n);
            return h;
        }
    return Subgroup::trivial(n);
}

/// k_perp = (N - s, r): the mode fixed by the generator (r, s).
inline ModeIndex k_perp(const GroupElement& g, int n) { return canonical_mode(n - g.s, g.r, n); }

/// Generator of the cyclic group fixing V_k pointwise (k != 0).
inline Subgroup kernel_of_mode(const ModeIndex& k, int n) {
    if (k.k1 == 0 && k.k2 == 0) return Subgroup::full(n);
    // (r, s) with r k1 + s k2 = 0 mod N: (r, s) = (N - k2, k1)
    return Subgroup::cyclic({n - k.k2, k.k1, n}, n);
}

// Hopf symmetry prediction
// ------------------------

/// Phase of a generator as a fraction numerator/N of the period.
struct PhaseShift {
    GroupElement generator;
    int numerator = 0;  // theta = numerator * P / N
};

struct SymmetryPrediction {
    Subgroup H;
    Subgroup K;
    std::vector<PhaseShift> theta;
    int row = 0;  // matching row of the abelian-Hopf table, 1..6
};

/// Spatio-temporal symmetries (H, K, Theta) of the branch bifurcating from an
/// equilibrium with isotropy `eq_isotropy` when the centre subspace lies in Z_mode.
/// The phase orientation assumes the orbit rotates V_k in the positive sense;
/// the opposite orientation negates every numerator.
inline SymmetryPrediction predict_hopf_symmetries(const Subgroup& eq_isotropy,
                                                  const ModeIndex& center_mode) {
    const int n = eq_isotropy.n();
    if (center_mode.k1 < 0 || center_mode.k1 >= n || center_mode.k2 < 0 || center_mode.k2 >= n)
        throw ClassificationError("centre mode outside Z_N x Z_N");
    const ModeIndex k = canonical_mode(center_mode.k1, center_mode.k2, n);
    const bool zero_mode = k.k1 == 0 && k.k2 == 0;

    auto phases_for = [&](const Subgroup& H) {
        std::vector<PhaseShift> th;
        for (const auto& g : H.generators()) th.push_back({g, pairing(g.r, g.s, k.k1, k.k2, n)});
        return th;
    };

    switch (eq_isotropy.kind()) {
        case Subgroup::Kind::full: {
            if (zero_mode) return {eq_isotropy, eq_isotropy, phases_for(eq_isotropy), 1};
            return {eq_isotropy, kernel_of_mode(k, n), phases_for(eq_isotropy), 2};
        }
        case Subgroup::Kind::cyclic: {
            const GroupElement& h = eq_isotropy.generator();
            if (zero_mode) return {eq_isotropy, eq_isotropy, phases_for(eq_isotropy), 3};
            if (pairing(h.r, h.s, k.k1, k.k2, n) != 0)
                return {eq_isotropy, Subgroup::trivial(n), phases_for(eq_isotropy), 4};
            return {eq_isotropy, eq_isotropy, phases_for(eq_isotropy), 5};
        }
        case Subgroup::Kind::trivial:
            return {eq_isotropy, eq_isotropy, {}, 6};
    }
    throw ClassificationError("unknown isotropy kind");
}

}  // namespace fhntorus
