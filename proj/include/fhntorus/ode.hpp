#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "fhntorus/errors.hpp"

namespace fhntorus {

struct Tolerances {
    double rtol = 1e-9;
    double atol = 1e-11;
    double h_init = 0.0;    // 0: automatic
    double h_min = 1e-12;   // relative to max(1, |t|)
    double max_step = 0.5;  // cap; keeps dense output well resolved
    long max_steps = 5'000'000;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
    double max_error = 0.0;  // largest accepted scaled error estimate
};

/// Accepted steps of an ODE solution with cubic Hermite dense output.
class Trajectory {
public:
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> derivs;
    IntegratorStats stats;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    void push(double t, Eigen::VectorXd y, Eigen::VectorXd f) {
        times.push_back(t);
        states.push_back(std::move(y));
        derivs.push_back(std::move(f));
    }

    /// Dense output at t (clamped to the stored range).
    Eigen::VectorXd at(double t) const {
        if (times.size() == 1 || t <= times.front()) return states.front();
        if (t >= times.back()) return states.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
        const double h = times[k + 1] - times[k];
        const double s = (t - times[k]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * states[k] + (h10 * h) * derivs[k] + h01 * states[k + 1] +
               (h11 * h) * derivs[k + 1];
    }

    /// Sub-trajectory with times in [t0, t1] (the bracketing samples included).
    Trajectory slice(double t0, double t1) const {
        Trajectory out;
        out.stats = stats;
        std::size_t i0 = static_cast<std::size_t>(
            std::upper_bound(times.begin(), times.end(), t0) - times.begin());
        if (i0 > 0) --i0;
        for (std::size_t i = i0; i < times.size(); ++i) {
            out.push(times[i], states[i], derivs[i]);
            if (times[i] >= t1) break;
        }
        return out;
    }
};

using RhsFn = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
/// Called after each accepted step; may modify the state in place.
using StepHook = std::function<void(double, Eigen::VectorXd&)>;

struct IntegrateOptions {
    Tolerances tol;
    double record_from = -std::numeric_limits<double>::infinity();
    StepHook post_step;
};

/// Dormand-Prince 5(4) with local extrapolation and max-norm error control
/// |err_i| <= atol + rtol max(|y_i|, |y_new_i|).
inline Trajectory dopri5(const RhsFn& f, double t0, Eigen::VectorXd y, double t_end,
                         const IntegrateOptions& opt = {}) {
    if (!(t_end > t0)) throw DomainError("t_end must exceed the start time");
    if (!y.allFinite()) throw DomainError("initial state must be finite");
    const Tolerances& tol = opt.tol;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index n = y.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n), err(n);
    Trajectory tr;
    double t = t0;
    f(t, y, k1);
    tr.stats.rhs_evals = 1;
    if (t >= opt.record_from) tr.push(t, y, k1);

    auto scaled_norm = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& a,
                           const Eigen::VectorXd& b) {
        double m = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = tol.atol + tol.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            m = std::max(m, std::abs(v[i]) / sc);
        }
        return m;
    };

    double h = tol.h_init;
    if (h <= 0.0) {
        const double d0 = scaled_norm(y, y, y), d1 = scaled_norm(k1, y, y);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, tol.max_step);
    }

    while (t < t_end) {
        if (tr.stats.steps + tr.stats.rejected >= tol.max_steps)
            throw StiffnessError("step budget exhausted", t);
        h = std::min({h, tol.max_step, t_end - t});
        if (h < tol.h_min * std::max(1.0, std::abs(t))) throw StiffnessError("step size underflow", t);

        yt = y + h * a21 * k1;
        f(t + c2 * h, yt, k2);
        yt = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, yt, k3);
        yt = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, yt, k4);
        yt = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, yt, k5);
        yt = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, yt, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h, ynew, k7);
        tr.stats.rhs_evals += 6;
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = scaled_norm(err, y, ynew);
        if (!std::isfinite(en)) {
            ++tr.stats.rejected;
            h *= 0.1;
            continue;
        }
        if (en <= 1.0) {
            t = (t_end - (t + h) < 1e-14 * std::max(1.0, std::abs(t_end))) ? t_end : t + h;
            y.swap(ynew);
            if (opt.post_step) {
                opt.post_step(t, y);
                f(t, y, k1);
                ++tr.stats.rhs_evals;
            } else {
                k1.swap(k7);
            }
            ++tr.stats.steps;
            tr.stats.max_error = std::max(tr.stats.max_error, en);
            if (t >= opt.record_from) tr.push(t, y, k1);
            const double fac = en == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(en, -0.2));
            h *= std::max(0.2, fac);
        } else {
            ++tr.stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
    }
    return tr;
}

}  // namespace fhntorus
