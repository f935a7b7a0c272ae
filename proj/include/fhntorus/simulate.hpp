#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhntorus/errors.hpp"
#include "fhntorus/model.hpp"
#include "fhntorus/ode.hpp"
#include "fhntorus/params.hpp"
#include "fhntorus/symmetry.hpp"

namespace fhntorus {

/// Full-lattice integration of rhs_network from z0 over [0, t_end].
inline Trajectory integrate(const StateVector& z0, const LatticeParams& lp, double t_end,
                            const IntegrateOptions& opt = {}) {
    require_dim(z0, lp);
    if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
    auto f = [&lp](double, const Eigen::VectorXd& z, Eigen::VectorXd& out) {
        rhs_network(z, lp, out);
    };
    return dopri5(f, 0.0, z0.data(), t_end, opt);
}

inline StateVector state_at(const Trajectory& tr, double t, int n) { return {n, tr.at(t)}; }

/// Integration with re-projection onto Fix(K) after every accepted step.
/// Drift above drift_tol (relative to max(1, |z|_inf)) throws InvariantError.
inline Trajectory reduced_integrate_fix(const Subgroup& K, const StateVector& z0,
                                        const LatticeParams& lp, double t_end,
                                        IntegrateOptions opt = {}, double drift_tol = 1e-9) {
    require_dim(z0, lp);
    if (K.n() != lp.n()) throw DimensionError("subgroup and lattice sizes differ");
    const double start_res = (z0.data() - project_fix(K, z0).data()).lpNorm<Eigen::Infinity>();
    if (start_res > 1e-10 * std::max(1.0, z0.data().lpNorm<Eigen::Infinity>()))
        throw DomainError("initial state is not in Fix(" + K.to_string() +
                          "), residual " + std::to_string(start_res));
    const int n = lp.n();
    const std::vector<GroupElement> elems = K.elements();
    double worst = 0.0;
    opt.post_step = [&, n](double t, Eigen::VectorXd& y) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(y.size());
        StateVector z(n, y);
        for (const auto& g : elems) acc += act(g, z).data();
        acc /= static_cast<double>(elems.size());
        const double drift = (y - acc).lpNorm<Eigen::Infinity>() /
                             std::max(1.0, y.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, drift);
        if (drift > drift_tol)
            throw InvariantError("Fix(" + K.to_string() + ") drift " + std::to_string(drift) +
                                 " at t = " + std::to_string(t));
        y = std::move(acc);
    };
    return integrate(z0, lp, t_end, opt);
}

// Periodic orbits
// ---------------

struct OrbitSettings {
    double transient_fraction = 0.5;
    double recurrence_tol = 1e-6;   // relative to the orbit amplitude
    double equilibrium_tol = 1e-9;  // std of the reference coordinate below this: no orbit
    int samples_per_period = 200;
};

struct PeriodicOrbit {
    double period = 0.0;
    double anchor_time = 0.0;
    Eigen::VectorXd anchor;
    double residual = 0.0;   // max_t |z(t + P) - z(t)|_inf over one period
    double amplitude = 0.0;  // max_t |z(t) - mean|_inf over one period
    Trajectory window;       // covers [anchor_time, anchor_time + 2 P]
    int n = 0;
};

namespace detail {

/// Golden-section minimum of a unimodal function on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

inline double recurrence(const Trajectory& tr, double t0, double P, int samples) {
    double worst = 0.0;
    for (int m = 0; m < samples; ++m) {
        const double t = t0 + P * m / samples;
        worst = std::max(worst, (tr.at(t + P) - tr.at(t)).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace detail

/// Period from upward zero crossings of the highest-variance coordinate after
/// the transient, refined by minimising the one-period recurrence residual.
inline std::optional<PeriodicOrbit> detect_periodic_orbit(const Trajectory& tr, int n,
                                                          const OrbitSettings& set = {}) {
    if (tr.size() < 4) return std::nullopt;
    const double t_start = tr.t_begin() + set.transient_fraction * (tr.t_end() - tr.t_begin());
    std::size_t i0 = static_cast<std::size_t>(
        std::lower_bound(tr.times.begin(), tr.times.end(), t_start) - tr.times.begin());
    if (tr.size() - i0 < 4) return std::nullopt;

    const Eigen::Index dim = tr.states.front().size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim), sq = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = i0; i < tr.size(); ++i) {
        mean += tr.states[i];
        sq += tr.states[i].cwiseAbs2();
    }
    const double cnt = static_cast<double>(tr.size() - i0);
    mean /= cnt;
    const Eigen::VectorXd var = (sq / cnt - mean.cwiseAbs2()).cwiseMax(0.0);
    Eigen::Index ref = 0;
    const double vmax = var.maxCoeff(&ref);
    if (std::sqrt(vmax) <= set.equilibrium_tol * std::max(1.0, std::abs(mean[ref])))
        return std::nullopt;

    // upward crossings of the reference coordinate through its mean
    std::vector<double> crossings;
    for (std::size_t i = i0; i + 1 < tr.size(); ++i) {
        const double u0 = tr.states[i][ref] - mean[ref], u1 = tr.states[i + 1][ref] - mean[ref];
        if (u0 < 0.0 && u1 >= 0.0) {
            double lo = tr.times[i], hi = tr.times[i + 1];
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (tr.at(mid)[ref] - mean[ref] < 0.0) lo = mid;
                else hi = mid;
            }
            crossings.push_back(0.5 * (lo + hi));
        }
    }
    if (crossings.size() < 3) return std::nullopt;
    std::vector<double> gaps;
    for (std::size_t i = 1; i < crossings.size(); ++i) gaps.push_back(crossings[i] - crossings[i - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double p0 = gaps[gaps.size() / 2];
    if (!(p0 > 0.0) || tr.t_end() - t_start < 2.2 * p0) return std::nullopt;

    const double anchor = tr.t_end() - 2.05 * p0;
    auto cost = [&](double P) { return detail::recurrence(tr, anchor, P, set.samples_per_period); };
    const double P = detail::golden_min(cost, 0.97 * p0, std::min(1.03 * p0, (tr.t_end() - anchor) / 2.0),
                                        1e-10 * p0);

    PeriodicOrbit orb;
    orb.n = n;
    orb.period = P;
    orb.anchor_time = anchor;
    orb.anchor = tr.at(anchor);
    orb.residual = cost(P);
    Eigen::VectorXd omean = Eigen::VectorXd::Zero(dim);
    for (int m = 0; m < set.samples_per_period; ++m)
        omean += tr.at(anchor + P * m / set.samples_per_period);
    omean /= set.samples_per_period;
    for (int m = 0; m < set.samples_per_period; ++m)
        orb.amplitude = std::max(
            orb.amplitude,
            (tr.at(anchor + P * m / set.samples_per_period) - omean).lpNorm<Eigen::Infinity>());
    if (!(orb.amplitude > 0.0) || orb.residual > set.recurrence_tol * orb.amplitude)
        return std::nullopt;
    orb.window = tr.slice(anchor, anchor + 2.0 * P);
    return orb;
}

// Spatio-temporal symmetry
// ------------------------

struct PhaseEntry {
    GroupElement sigma;
    double theta = 0.0;  // raw phase in [0, P)
    int numerator = 0;   // theta ~ numerator * P / N
    bool quantized = true;
    double mismatch = 0.0;  // max_t |sigma z(t) - z(t + theta)|_inf / amplitude
};

struct OrbitSymmetry {
    double period = 0.0;
    Subgroup H = Subgroup::trivial(3);
    Subgroup K = Subgroup::trivial(3);
    std::vector<PhaseEntry> phases;    // one per generator of H
    std::vector<PhaseEntry> accepted;  // every spatio-temporal symmetry found
    Warnings warnings;
};

struct ClassifySettings {
    double tol = 1e-3;              // acceptance, relative to the orbit amplitude
    int samples_per_period = 64;    // time grid
    int phase_grid_per_n = 64;      // phase grid: N * this many samples per period
    double quantize_tol = 0.02;     // allowed |theta - q P / N| as a fraction of P
};

/// Finds every (sigma, theta) with sigma z(t) = z(t + theta) on the orbit and
/// reports H, K and the phases, quantised to multiples of P / N.
inline OrbitSymmetry classify_spatiotemporal(const std::optional<PeriodicOrbit>& orbit,
                                             const ClassifySettings& set = {}) {
    if (!orbit) throw DomainError("no periodic orbit to classify");
    const PeriodicOrbit& orb = *orbit;
    const int n = orb.n;
    const double P = orb.period;
    const int per = n * set.phase_grid_per_n;  // phase samples per period
    const double dt = P / per;
    const int stride = std::max(1, per / set.samples_per_period);

    std::vector<StateVector> S;
    S.reserve(2 * per + 1);
    for (int q = 0; q <= 2 * per; ++q) S.emplace_back(n, orb.window.at(orb.anchor_time + q * dt));

    auto mismatch = [&](const GroupElement& g, double theta) {
        double worst = 0.0;
        for (int m = 0; m < per; m += stride) {
            const double t = orb.anchor_time + m * dt;
            const Eigen::VectorXd lhs = act(g, S[m]).data();
            worst = std::max(worst, (lhs - orb.window.at(t + theta)).lpNorm<Eigen::Infinity>());
        }
        return worst;
    };

    OrbitSymmetry out;
    out.period = P;
    std::set<GroupElement> hset, kset;
    for (const auto& g : group_elements(n)) {
        int best_j = 0;
        double best = INFINITY;
        std::vector<Eigen::VectorXd> moved;
        for (int m = 0; m < per; m += stride) moved.push_back(act(g, S[m]).data());
        for (int j = 0; j < per; ++j) {
            double worst = 0.0;
            int idx = 0;
            for (int m = 0; m < per && worst < best; m += stride, ++idx)
                worst = std::max(worst, (moved[idx] - S[m + j].data()).lpNorm<Eigen::Infinity>());
            if (worst < best) best = worst, best_j = j;
        }
        if (best > 0.1 * orb.amplitude + set.tol * orb.amplitude) continue;
        // refine around the grid optimum (periodic in theta)
        const double theta0 = best_j * dt;
        double theta = detail::golden_min([&](double th) { return mismatch(g, th); },
                                          theta0 - dt, theta0 + dt, 1e-9 * P);
        const double mis = mismatch(g, theta);
        if (mis > set.tol * orb.amplitude) continue;
        theta = std::fmod(std::fmod(theta, P) + P, P);
        PhaseEntry e;
        e.sigma = g;
        e.theta = theta;
        e.mismatch = mis / orb.amplitude;
        const double q = theta * n / P;
        e.numerator = mod_n(static_cast<long long>(std::llround(q)), n);
        e.quantized = std::abs(q - std::round(q)) * P / n <= set.quantize_tol * P;
        if (!e.quantized)
            out.warnings.push_back({"unquantized-phase", "phase of (" + std::to_string(g.r) + "," +
                                                             std::to_string(g.s) +
                                                             ") is not a multiple of P/N"});
        out.accepted.push_back(e);
        hset.insert(g);
        if (e.numerator == 0) kset.insert(g);
    }
    out.H = Subgroup::from_elements(hset, n);
    out.K = Subgroup::from_elements(kset, n);
    for (const auto& gen : out.H.generators())
        for (const auto& e : out.accepted)
            if (e.sigma == gen) out.phases.push_back(e);
    return out;
}

}  // namespace fhntorus
