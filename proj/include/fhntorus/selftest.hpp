#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fhntorus/bifurcation.hpp"
#include "fhntorus/model.hpp"
#include "fhntorus/spectral.hpp"
#include "fhntorus/symmetry.hpp"

namespace fhntorus {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline LatticeParams random_lattice(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.2, 2.0), cc(0.0, 0.3);
    return {{u(rng), pos(rng), cc(rng)}, {u(rng), u(rng)}, n};
}

inline StateVector random_state(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    StateVector z(n);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = u(rng);
    return z;
}

}  // namespace detail

/// Quick invariant suites, one entry per module.
inline std::vector<CheckResult> run_selftest(unsigned seed = 20240611) {
    std::mt19937_64 rng(seed);
    std::vector<CheckResult> out;
    auto check = [&](std::string name, const std::function<std::string()>& body) {
        CheckResult r{std::move(name), false, {}};
        try {
            r.detail = body();
            r.passed = r.detail.empty();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    };

    check("core-model: origin equilibrium and equivariance", [&]() -> std::string {
        for (int n : {3, 5}) {
            const LatticeParams lp = detail::random_lattice(rng, n);
            if (rhs_network(StateVector(n), lp).data().lpNorm<Eigen::Infinity>() != 0.0)
                return "rhs_network(0) != 0";
            const StateVector z = detail::random_state(rng, n);
            for (const auto& g : group_elements(n)) {
                const double d = (rhs_network(act(g, z), lp).data() - act(g, rhs_network(z, lp)).data())
                                     .lpNorm<Eigen::Infinity>();
                if (d > 1e-12) return "equivariance defect " + std::to_string(d);
            }
        }
        return {};
    });

    check("core-model: Jacobian matches central differences", [&]() -> std::string {
        const int n = 3;
        const LatticeParams lp = detail::random_lattice(rng, n);
        const StateVector z = detail::random_state(rng, n);
        const Eigen::MatrixXd J = jacobian_at(z, lp).full;
        const double h = 1e-5;
        for (int k = 0; k < lp.dim(); ++k) {
            StateVector zp = z, zm = z;
            zp.data()[k] += h;
            zm.data()[k] -= h;
            const Eigen::VectorXd col =
                (rhs_network(zp, lp).data() - rhs_network(zm, lp).data()) / (2 * h);
            if ((col - J.col(k)).lpNorm<Eigen::Infinity>() > 1e-6) return "column " + std::to_string(k);
        }
        return {};
    });

    check("symmetry: decomposition and Fix dimensions", [&]() -> std::string {
        for (int n : {3, 5, 7}) {
            int total = 0;
            for (const auto& k : mode_index_set(n)) total += k.dim;
            if (total != n * n) return "sum dim V_k != N^2 at N = " + std::to_string(n);
            for (const auto& g : group_elements(n)) {
                if (g.is_identity()) continue;
                int d = 0;
                for (const auto& k : fix_modes(g, n)) d += k.dim;
                if (d != n) return "dim Fix != N";
            }
        }
        return {};
    });

    check("symmetry: isotypic projections resolve the identity", [&]() -> std::string {
        const int n = 5;
        const StateVector z = detail::random_state(rng, n);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(z.size());
        for (const auto& k : mode_index_set(n)) acc += project_isotypic(z, k).data();
        const double d = (acc - z.data()).lpNorm<Eigen::Infinity>();
        return d <= 1e-12 ? std::string{} : "defect " + std::to_string(d);
    });

    check("spectral: eigen-residuals", [&]() -> std::string {
        for (int n : {3, 5}) {
            const auto rep = spectrum_report(detail::random_lattice(rng, n), {1e-10, 1e-9, false});
            if (!rep.residuals_ok) return "max residual " + std::to_string(rep.max_residual);
            if (static_cast<int>(rep.records.size()) != 2 * n * n) return "record count";
        }
        return {};
    });

    check("bifurcation: critical values and s*", [&]() -> std::string {
        std::uniform_real_distribution<double> mag(0.2, 2.0);
        for (int sg = 0; sg < 4; ++sg) {
            const double g = (sg & 1 ? 1 : -1) * mag(rng), d = (sg & 2 ? 1 : -1) * mag(rng);
            const LatticeParams lp({0.0, 1.0, 0.0}, {g, d}, 5);
            const double a_star = critical_a(lp).a_star;
            const double a_num = numeric_critical_a(lp, a_star - 1.0, a_star + 1.0);
            if (std::abs(a_num - a_star) > 1e-8) return "numeric a* mismatch";
        }
        if (lyapunov_coefficient_sync({0.0, 1.0, 0.0}) != -0.375) return "s* != -3/8";
        return {};
    });

    return out;
}

}  // namespace fhntorus
