#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fhntorus/errors.hpp"
#include "fhntorus/params.hpp"
#include "fhntorus/spectral.hpp"
#include "fhntorus/symmetry.hpp"

namespace fhntorus {

/// Signs of (gamma, delta).
enum class SignPattern { minus_minus, plus_minus, minus_plus, plus_plus };

inline SignPattern sign_pattern(const CouplingParams& k) {
    if (k.gamma == 0.0 || k.delta == 0.0)
        throw DomainError("coupling constants must satisfy gamma * delta != 0");
    const bool gp = k.gamma > 0.0, dp = k.delta > 0.0;
    if (!gp && !dp) return SignPattern::minus_minus;
    if (gp && !dp) return SignPattern::plus_minus;
    if (!gp && dp) return SignPattern::minus_plus;
    return SignPattern::plus_plus;
}

inline const char* to_string(SignPattern p) noexcept {
    switch (p) {
        case SignPattern::minus_minus: return "(-,-)";
        case SignPattern::plus_minus: return "(+,-)";
        case SignPattern::minus_plus: return "(-,+)";
        case SignPattern::plus_plus: return "(+,+)";
    }
    return "?";
}

/// theta_N = (N - 1) pi / N.
inline double theta_n(int n) { return (n - 1) * std::numbers::pi / n; }

struct ModeRef {
    int r = 0;
    int s = 0;
    Branch branch = Branch::plus;
    cplx lambda;
};

/// Loss of stability of the origin at c = 0.
struct CriticalPoint {
    SignPattern pattern = SignPattern::minus_minus;
    double a_star = 0.0;
    double theta = 0.0;
    std::vector<ModeRef> crossing_modes;  // every eigenvalue on the imaginary axis at a_star
    ModeRef leading;                      // crossing eigenvalue with the largest imaginary part
    Subgroup K = Subgroup::full(3);       // spatial symmetry of the leading branch
    Warnings warnings;
};

inline void require_c0_setting(const LatticeParams& lp) {
    if (lp.c() != 0.0) throw DomainError("this analysis requires c = 0");
    if (!(lp.b() > 0.0)) throw DomainError("this analysis requires b > 0");
}

/// Critical value of a at c = 0, by sign pattern of (gamma, delta):
///   (-,-): 0;  (+,-): gamma (1 - cos theta_N);  (-,+): delta (1 - cos theta_N);
///   (+,+): (gamma + delta)(1 - cos theta_N).
inline double critical_a_value(SignPattern p, double gamma, double delta, int n) {
    const double w = 1.0 - std::cos(theta_n(n));
    switch (p) {
        case SignPattern::minus_minus: return 0.0;
        case SignPattern::plus_minus: return gamma * w;
        case SignPattern::minus_plus: return delta * w;
        case SignPattern::plus_plus: return (gamma + delta) * w;
    }
    return 0.0;
}

/// Modes whose real part vanishes at a_star, c = 0. r_{+/-} = (N +/- 1)/2.
inline std::vector<std::pair<int, int>> crossing_mode_set(SignPattern p, int n) {
    const int rp = (n + 1) / 2, rm = (n - 1) / 2;
    switch (p) {
        case SignPattern::minus_minus: return {{0, 0}};
        case SignPattern::plus_minus: return {{rp, 0}, {rm, 0}};
        case SignPattern::minus_plus: return {{0, rp}, {0, rm}};
        case SignPattern::plus_plus: return {{rp, rp}, {rm, rm}, {rp, rm}, {rm, rp}};
    }
    return {};
}

/// Mode of the non-resonant first branch: (0,0), (r+,0), (0,r+) or (r+,r+).
inline std::pair<int, int> leading_mode(SignPattern p, int n) { return crossing_mode_set(p, n).front(); }

/// Spatial symmetry of the first branch. The (+,+) entry is the kernel of the
/// (r+, r+) mode, Z((N-1)/2, (N+1)/2), canonically Z(1, N-1).
inline Subgroup critical_K(SignPattern p, int n) {
    auto [r, s] = leading_mode(p, n);
    return kernel_of_mode(canonical_mode(r, s, n), n);
}

inline CriticalPoint critical_a(const LatticeParams& lp) {
    require_c0_setting(lp);
    const int n = lp.n();
    CriticalPoint cp;
    cp.pattern = sign_pattern(lp.coupling());
    cp.theta = theta_n(n);
    cp.a_star = critical_a_value(cp.pattern, lp.gamma(), lp.delta(), n);
    cp.K = critical_K(cp.pattern, n);
    cp.warnings = coupling_warnings(lp);

    const LatticeParams at = lp.with_a(cp.a_star);
    for (auto [r, s] : crossing_mode_set(cp.pattern, n)) {
        auto [p, m] = analytic_eigenvalues(r, s, at);
        cp.crossing_modes.push_back({r, s, Branch::plus, p});
        cp.crossing_modes.push_back({r, s, Branch::minus, m});
    }
    auto [lr, ls] = leading_mode(cp.pattern, n);
    auto [p, m] = analytic_eigenvalues(lr, ls, at);
    cp.leading = p.imag() >= m.imag() ? ModeRef{lr, ls, Branch::plus, p}
                                      : ModeRef{lr, ls, Branch::minus, m};
    return cp;
}

/// Bisection oracle for the loss of stability: the a in [lo, hi] where
/// max Re lambda changes sign (positive below, negative above).
inline double numeric_critical_a(const LatticeParams& lp, double lo, double hi,
                                 double tol = 1e-13) {
    auto g = [&](double a) { return max_real_part(lp.with_a(a)); };
    if (!(g(lo) > 0.0) || !(g(hi) < 0.0))
        throw BracketError("max Re lambda does not change sign from + to - on [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
    while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// First Lyapunov coefficient
// --------------------------

/// Second and third derivatives at 0 of the nonlinear parts (f, g) of a planar
/// system in the form x' = -omega y + f, y' = omega x + g.
struct PlanarJet {
    double fxx = 0, fxy = 0, fyy = 0, fxxx = 0, fxyy = 0;
    double gxx = 0, gxy = 0, gyy = 0, gxxy = 0, gyyy = 0;
};

/// Guckenheimer-Holmes coefficient s with
///   16 s = f_xxx + f_xyy + g_xxy + g_yyy
///          + [f_xy (f_xx + f_yy) - g_xy (g_xx + g_yy) - f_xx g_xx + f_yy g_yy] / omega.
inline double planar_lyapunov(const PlanarJet& j, double omega) {
    const double cubic = j.fxxx + j.fxyy + j.gxxy + j.gyyy;
    const double quad =
        j.fxy * (j.fxx + j.fyy) - j.gxy * (j.gxx + j.gyy) - j.fxx * j.gxx + j.fyy * j.gyy;
    return (cubic + quad / omega) / 16.0;
}

/// s* of the synchronized Hopf point (a = c = 0). After y = sqrt(b) Y the
/// cell reads x' = -sqrt(b) Y + f, Y' = sqrt(b) x + g with
/// f = x (a - x)(x - 1) = -x^3 + (1 + a) x^2 - a x and g = -c Y.
inline double lyapunov_coefficient_sync(const CellParams& p) {
    if (p.a != 0.0 || p.c != 0.0 || !(p.b > 0.0))
        throw DomainError("synchronized Lyapunov coefficient needs a = 0, c = 0, b > 0");
    PlanarJet j;
    j.fxx = 2.0 * (1.0 + p.a);
    j.fxxx = -6.0;
    return planar_lyapunov(j, std::sqrt(p.b));
}

// Dulac criterion for the single cell
// -----------------------------------

struct DulacCertificate {
    double a = 0.0;
    double b = 1.0;
    bool certified = false;
    double discriminant = 0.0;  // of -3x^2 + 2 a x - a

    /// div(phi f1, phi f2) with phi(y) = exp(-2 y / b).
    double divergence(double x, double y) const {
        return (-3.0 * x * x + 2.0 * a * x - a) * std::exp(-2.0 * y / b);
    }
};

/// Certifies that the uncoupled cell (c = 0) has no periodic orbit: the
/// Dulac divergence is nonpositive everywhere iff 0 <= a <= 3.
inline DulacCertificate dulac_certificate(const CellParams& p) {
    if (p.c != 0.0) throw DomainError("Dulac certificate is stated for c = 0");
    if (!(p.b > 0.0)) throw DomainError("Dulac certificate needs b > 0");
    DulacCertificate d{p.a, p.b, false, 4.0 * p.a * p.a - 12.0 * p.a};
    d.certified = p.a >= 0.0 && p.a <= 3.0 && d.discriminant <= 0.0;
    return d;
}

// Resonances
// ----------

struct Resonance {
    int k = 0;
    ModeRef faster;  // Im lambda = k * Im(slower)
    ModeRef slower;
    double ratio = 0.0;
};

/// Integer ratios k = 2..k_max between the positive imaginary parts of the
/// eigenvalues on the imaginary axis at a_star (c = 0), relative tolerance rel_tol.
inline std::vector<Resonance> resonance_check(const LatticeParams& lp, int k_max = 10,
                                              double rel_tol = 1e-9) {
    const CriticalPoint cp = critical_a(lp);
    std::vector<ModeRef> freq;
    for (const auto& m : cp.crossing_modes) {
        if (!(m.lambda.imag() > 0.0)) continue;
        const bool dup = std::any_of(freq.begin(), freq.end(), [&](const ModeRef& f) {
            return std::abs(f.lambda.imag() - m.lambda.imag()) <= 1e-12 * m.lambda.imag();
        });
        if (!dup) freq.push_back(m);
    }
    std::vector<Resonance> out;
    for (const auto& hi : freq)
        for (const auto& lo : freq) {
            if (!(hi.lambda.imag() > lo.lambda.imag())) continue;
            const double ratio = hi.lambda.imag() / lo.lambda.imag();
            const double k = std::round(ratio);
            if (k >= 2 && k <= k_max && std::abs(ratio - k) <= rel_tol * k)
                out.push_back({static_cast<int>(k), hi, lo, ratio});
        }
    return out;
}

/// Closed form of the (+,-) resonance: gamma^2 sin^2(theta_N) = ((k-1)^2 / k) b.
inline double resonant_gamma_plus_minus(int k, double b, int n) {
    return std::sqrt((k - 1.0) * (k - 1.0) / k * b) / std::sin(theta_n(n));
}

// Stability of the origin
// -----------------------

/// Re lambda_+ < 0 for the mode symbol A = x + i y, from the sign analysis
///   p1 = (c - x)^2 - 4 x c + y^2 + 4 b,
///   p2 = [(c + x)^2 - y^2 - 4 b]^2 + 4 y^2 (c + x)^2:
/// stable iff c - x > 0, p1 > 0 and p2 < p1^2.
inline bool p1p2_stable(cplx A, double b, double c) {
    const double x = A.real(), y = A.imag();
    if (!(c - x > 0.0)) return false;
    const double p1 = (c - x) * (c - x) - 4.0 * x * c + y * y + 4.0 * b;
    const double X = (c + x) * (c + x) - y * y - 4.0 * b;
    const double p2 = X * X + 4.0 * y * y * (c + x) * (c + x);
    return p1 > 0.0 && p2 < p1 * p1;
}

struct StabilityVerdict {
    bool stable = false;
    ModeRef leading;
    double margin = 0.0;         // max Re lambda
    bool analytic_agrees = true; // p1/p2 predicate agrees with the scan
    Warnings warnings;
};

/// The eigenvalue scan is authoritative; the p1/p2 predicate is a cross-check
/// (skipped for modes whose leading real part is within 1e-9 of zero).
inline StabilityVerdict origin_stability(const LatticeParams& lp) {
    const LeadingEigenvalue le = leading_eigenvalue(lp);
    StabilityVerdict v;
    v.leading = {le.r, le.s, le.branch, le.lambda};
    v.margin = le.lambda.real();
    v.stable = v.margin < 0.0;
    v.warnings = coupling_warnings(lp);
    const int n = lp.n();
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            auto [p, m] = analytic_eigenvalues(r, s, lp);
            const double lead = std::max(p.real(), m.real());
            if (std::abs(lead) < 1e-9) continue;
            if (p1p2_stable(coupling_symbol(r, s, lp), lp.b(), lp.c()) != (lead < 0.0))
                v.analytic_agrees = false;
        }
    return v;
}

/// psi(x) = (b - c x)(c - x)^2 / (c x). At the first crossing for c > 0 the
/// mode symbol A = x + i y satisfies y^2 = psi(x).
inline double psi(double x, double b, double c) {
    if (!(c > 0.0)) throw DomainError("psi needs c > 0");
    if (!(x > 0.0)) throw DomainError("psi needs x > 0");
    return (b - c * x) * (c - x) * (c - x) / (c * x);
}

// Hopf crossing
// -------------

enum class Criticality { subcritical, supercritical, undetermined };

inline const char* to_string(Criticality c) noexcept {
    switch (c) {
        case Criticality::subcritical: return "subcritical";
        case Criticality::supercritical: return "supercritical";
        case Criticality::undetermined: return "undetermined";
    }
    return "?";
}

struct HopfReport {
    SignPattern pattern = SignPattern::minus_minus;
    double a_hat = 0.0;
    double a_star = 0.0;
    double c = 0.0;
    ModeRef mode;  // crossing eigenvalue with Im > 0
    double omega_hopf = 0.0;
    Subgroup K = Subgroup::full(3);
    std::vector<Resonance> resonances;
    Criticality criticality = Criticality::undetermined;
    std::optional<double> s_star;
    int on_axis_count = 0;          // eigenvalues with |Re| <= re_tol at a_hat
    double others_max_re = 0.0;     // max Re over the remaining eigenvalues
    bool ordering_ok = true;        // crossing mode equals the c = 0 leading mode
    Warnings warnings;
};

struct HopfOptions {
    double a_tol = 1e-12;
    double re_tol = 1e-10;
    int scan_steps = 400;
    int resonance_k_max = 10;
};

namespace detail {

inline void fill_axis_stats(HopfReport& rep, const LatticeParams& at, double re_tol) {
    const int n = at.n();
    rep.on_axis_count = 0;
    rep.others_max_re = -INFINITY;
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            auto [p, m] = analytic_eigenvalues(r, s, at);
            for (const cplx& lam : {p, m}) {
                if (std::abs(lam.real()) <= re_tol)
                    ++rep.on_axis_count;
                else
                    rep.others_max_re = std::max(rep.others_max_re, lam.real());
            }
        }
}

/// Eigenvalue with the largest real part, preferring Im > 0 within a pair.
inline ModeRef crossing_eigenvalue(const LatticeParams& at, double re_tol) {
    const int n = at.n();
    const double top = max_real_part(at);
    ModeRef best;
    best.lambda = cplx(-INFINITY, -INFINITY);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            auto [p, m] = analytic_eigenvalues(r, s, at);
            for (auto [lam, br] : {std::pair{p, Branch::plus}, std::pair{m, Branch::minus}})
                if (lam.real() >= top - re_tol && lam.imag() > best.lambda.imag())
                    best = {r, s, br, lam};
        }
    return best;
}

}  // namespace detail

/// Report at the c = 0 critical point (a_hat = a_star). s* is filled for the
/// synchronized branch.
inline HopfReport hopf_at_critical(const LatticeParams& lp, const HopfOptions& opt = {}) {
    const CriticalPoint cp = critical_a(lp);
    HopfReport rep;
    rep.pattern = cp.pattern;
    rep.a_hat = rep.a_star = cp.a_star;
    rep.c = 0.0;
    rep.mode = cp.leading;
    rep.omega_hopf = cp.leading.lambda.imag();
    rep.K = cp.K;
    rep.resonances = resonance_check(lp, opt.resonance_k_max);
    rep.warnings = cp.warnings;
    if (cp.pattern == SignPattern::minus_minus) {
        CellParams cell = lp.cell();
        cell.a = 0.0;
        rep.s_star = lyapunov_coefficient_sync(cell);
    }
    detail::fill_axis_stats(rep, lp.with_a(cp.a_star), opt.re_tol);
    return rep;
}

/// First loss of stability for small c > 0: decreases a from a_star and
/// root-finds a_hat where max Re lambda = 0 (bisection refined by secant
/// steps inside the bracket [a_star - max(1, 10 c), a_star]).
inline HopfReport hopf_crossing(const LatticeParams& lp, const HopfOptions& opt = {}) {
    const double c = lp.c(), b = lp.b();
    if (!(c > 0.0)) throw DomainError("hopf_crossing needs c > 0");
    if (!(b > 0.0)) throw DomainError("hopf_crossing needs b > 0");
    if (!(c * c < b)) throw DomainError("hopf_crossing needs c^2 < b");

    const LatticeParams lp0 = lp.with_c(0.0);
    const CriticalPoint cp = critical_a(lp0);

    HopfReport rep;
    rep.pattern = cp.pattern;
    rep.a_star = cp.a_star;
    rep.c = c;
    rep.warnings = coupling_warnings(lp);
    if (c > 0.2 * std::sqrt(b))
        rep.warnings.push_back({"large-c", "c > 0.2 sqrt(b): small-c results may not apply"});
    if (cp.pattern == SignPattern::plus_plus && lp.coupling().degenerate())
        rep.warnings.push_back({"real-crossing-possible",
                                "gamma == delta makes A(r+, r-) real; real eigenvalues may cross"});

    auto g = [&](double a) { return max_real_part(lp.with_a(a)); };
    const double width = std::max(1.0, 10.0 * c);
    double hi = cp.a_star, g_hi = g(hi);
    if (!(g_hi < 0.0))
        throw BracketError("origin not stable at a_star = " + std::to_string(hi) +
                           " (max Re lambda = " + std::to_string(g_hi) + ")");
    double lo = hi, g_lo = g_hi;
    const double step = width / opt.scan_steps;
    bool found = false;
    for (int i = 1; i <= opt.scan_steps; ++i) {
        lo = cp.a_star - i * step;
        g_lo = g(lo);
        if (g_lo >= 0.0) {
            found = true;
            break;
        }
        hi = lo;
        g_hi = g_lo;
    }
    if (!found)
        throw BracketError("no sign change of max Re lambda in [" +
                           std::to_string(cp.a_star - width) + ", " +
                           std::to_string(cp.a_star) + "]; max Re at lower end = " +
                           std::to_string(g_lo));

    // g(lo) >= 0 > g(hi)
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm >= 0.0) lo = mid, g_lo = gm;
        else hi = mid, g_hi = gm;
    }
    for (int it = 0; it < 60 && hi - lo > opt.a_tol; ++it) {
        double trial = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
        const double gt = g(trial);
        if (gt == 0.0) {
            lo = hi = trial;
            g_lo = g_hi = 0.0;
            break;
        }
        if (gt > 0.0) lo = trial, g_lo = gt;
        else hi = trial, g_hi = gt;
        // keep the bracket shrinking when the secant stalls on one side
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm >= 0.0) lo = mid, g_lo = gm;
        else hi = mid, g_hi = gm;
    }
    rep.a_hat = std::abs(g_lo) < std::abs(g_hi) ? lo : hi;

    const LatticeParams at = lp.with_a(rep.a_hat);
    rep.mode = detail::crossing_eigenvalue(at, opt.re_tol);
    rep.omega_hopf = rep.mode.lambda.imag();
    rep.K = kernel_of_mode(canonical_mode(rep.mode.r, rep.mode.s, lp.n()), lp.n());
    rep.ordering_ok = rep.mode.r == cp.leading.r && rep.mode.s == cp.leading.s;
    rep.resonances = resonance_check(lp0, opt.resonance_k_max);
    detail::fill_axis_stats(rep, at, opt.re_tol);
    return rep;
}

}  // namespace fhntorus
