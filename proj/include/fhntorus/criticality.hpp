#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fhntorus/bifurcation.hpp"
#include "fhntorus/simulate.hpp"
#include "fhntorus/spectral.hpp"

namespace fhntorus {

struct ProbeSettings {
    double perturbation = 1e-3;       // times sqrt(b)
    double offset = 0.005;            // base distance |a - a_hat|; samples at 1x, 2x, 4x
    int chunk_periods = 50;           // horizon per chunk, in periods 2 pi / omega_hopf
    int max_chunks = 16;
    double converge_rel = 0.01;       // amplitude change between chunks
    double small_amplitude = 0.5;     // a branch orbit larger than this is not "small"
    double escape_radius = 50.0;
    Tolerances tol{1e-8, 1e-10};
};

struct AmplitudeSample {
    double a = 0.0;
    double offset = 0.0;     // a_hat - a (positive on the unstable side)
    double amplitude = 0.0;  // max |z|_inf over the last chunk
    bool converged = false;
    bool escaped = false;
};

struct ProbeResult {
    Criticality criticality = Criticality::undetermined;
    std::vector<AmplitudeSample> unstable_side;
    AmplitudeSample stable_side;
    double slope = 0.0;      // least-squares amplitude^2 vs offset
    double intercept = 0.0;
    bool failed = false;     // integration failure
    std::string diagnostics;
};

namespace detail {

inline AmplitudeSample probe_run(const LatticeParams& lp, const Subgroup& K,
                                 const StateVector& z0, double a, double a_hat, double period,
                                 const ProbeSettings& set) {
    AmplitudeSample s;
    s.a = a;
    s.offset = a_hat - a;
    const LatticeParams at = lp.with_a(a);
    IntegrateOptions opt;
    opt.tol = set.tol;
    StateVector z = z0;
    double prev = -1.0;
    for (int chunk = 0; chunk < set.max_chunks; ++chunk) {
        const double horizon = set.chunk_periods * period;
        opt.record_from = 0.5 * horizon;
        const Trajectory tr = reduced_integrate_fix(K, z, at, horizon, opt);
        double amp = 0.0;
        for (const auto& y : tr.states) amp = std::max(amp, y.lpNorm<Eigen::Infinity>());
        z = StateVector(lp.n(), tr.states.back());
        z = project_fix(K, z);
        s.amplitude = amp;
        if (amp > set.escape_radius) {
            s.escaped = true;
            return s;
        }
        if (prev >= 0.0 && std::abs(amp - prev) <= set.converge_rel * std::max(amp, 1e-12)) {
            s.converged = true;
            return s;
        }
        prev = amp;
    }
    return s;
}

}  // namespace detail

/// Integrates the flow inside Fix(K) from a small perturbation of the origin
/// along the crossing eigenvector, at a_hat - d, a_hat - 2d, a_hat - 4d
/// (origin unstable) and at a_hat + d (origin stable).
///
/// subcritical: small bounded orbits on the unstable side with amplitude^2
///   growing linearly in the offset, and decay on the stable side;
/// supercritical: the unstable side leaves for a large attractor (the branch
///   lies on the stable side);
/// undetermined: anything else, including integration failure.
///
/// A converged sample only means the amplitude settled for one chunk. At c = 0
/// both eigenvalue pairs of a non-synchronous crossing block cross together,
/// and the small wave can be a saddle inside Fix(K) that is left much later;
/// for N = 3, (+,-) and (+,+), this happens a few thousand time units in at d = 0.005.
inline ProbeResult branch_criticality_probe(const HopfReport& rep, const LatticeParams& lp,
                                            const ProbeSettings& set = {}) {
    ProbeResult out;
    if (!(rep.omega_hopf > 0.0)) {
        out.failed = true;
        out.diagnostics = "report has no positive crossing frequency";
        return out;
    }
    const int n = lp.n();
    const LatticeParams at = lp.with_a(rep.a_hat);
    const Eigen::VectorXcd xi = analytic_eigenvector(rep.mode.r, rep.mode.s, rep.mode.branch, at);
    Eigen::VectorXd dir = xi.real();
    dir /= dir.lpNorm<Eigen::Infinity>();
    StateVector z0(n, set.perturbation * std::sqrt(lp.b()) * dir);
    const double fix_res = fix_residual(rep.K, z0);
    if (fix_res > 1e-9) {
        out.failed = true;
        out.diagnostics = "crossing eigenvector not in Fix(" + rep.K.to_string() +
                          "), residual " + std::to_string(fix_res);
        return out;
    }
    z0 = project_fix(rep.K, z0);
    const double period = 2.0 * std::numbers::pi / rep.omega_hopf;

    try {
        for (double m : {1.0, 2.0, 4.0})
            out.unstable_side.push_back(detail::probe_run(lp, rep.K, z0, rep.a_hat - m * set.offset,
                                                          rep.a_hat, period, set));
        out.stable_side =
            detail::probe_run(lp, rep.K, z0, rep.a_hat + set.offset, rep.a_hat, period, set);
    } catch (const NumericalError& e) {
        out.failed = true;
        out.diagnostics = e.what();
        return out;
    }

    // least squares amplitude^2 = slope * offset + intercept
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(out.unstable_side.size());
    for (const auto& s : out.unstable_side) {
        const double x = s.offset, y = s.amplitude * s.amplitude;
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    out.intercept = (sy - out.slope * sx) / cnt;

    const auto& u = out.unstable_side;
    const bool all_converged = std::all_of(u.begin(), u.end(), [](const AmplitudeSample& s) {
        return s.converged && !s.escaped;
    });
    const bool stable_decays = out.stable_side.amplitude < set.perturbation * std::sqrt(lp.b());
    const bool small = u.front().amplitude < set.small_amplitude;
    const double ratio = (u.back().amplitude * u.back().amplitude) /
                         std::max(u.front().amplitude * u.front().amplitude, 1e-300);
    const bool scales = out.slope > 0.0 && ratio > 2.0 && ratio < 8.0 &&
                        std::abs(out.intercept) < 0.5 * u.front().amplitude * u.front().amplitude;

    if (all_converged && small && scales && stable_decays) {
        out.criticality = Criticality::subcritical;
    } else if (std::any_of(u.begin(), u.end(), [](const AmplitudeSample& s) { return s.escaped; }) ||
               (all_converged && !small && ratio < 2.0)) {
        out.criticality = Criticality::supercritical;
    } else {
        out.criticality = Criticality::undetermined;
        out.diagnostics = "unstable-side amplitudes neither scale like sqrt(offset) nor jump";
    }
    return out;
}

}  // namespace fhntorus
