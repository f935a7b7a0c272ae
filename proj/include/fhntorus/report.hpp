#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhntorus/bifurcation.hpp"
#include "fhntorus/criticality.hpp"
#include "fhntorus/errors.hpp"
#include "fhntorus/ode.hpp"
#include "fhntorus/simulate.hpp"
#include "fhntorus/spectral.hpp"

namespace fhntorus {

using Json = nlohmann::ordered_json;

/// %.17g: round-trips every double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Json to_json(const LatticeParams& lp) {
    return Json{{"N", lp.n()},     {"a", lp.a()},         {"b", lp.b()},
                {"c", lp.c()},     {"gamma", lp.gamma()}, {"delta", lp.delta()}};
}

inline Json to_json(const Warnings& ws) {
    Json out = Json::array();
    for (const auto& w : ws) out.push_back({{"code", w.code}, {"message", w.message}});
    return out;
}

inline Json to_json(const ModeRef& m) {
    return Json{{"r", m.r},
                {"s", m.s},
                {"branch", to_string(m.branch)},
                {"re", m.lambda.real()},
                {"im", m.lambda.imag()}};
}

inline Json to_json(const SpectrumReport& rep) {
    Json recs = Json::array();
    for (const auto& r : rep.records)
        recs.push_back({{"r", r.r},
                        {"s", r.s},
                        {"branch", to_string(r.branch)},
                        {"re", r.lambda.real()},
                        {"im", r.lambda.imag()},
                        {"residual", r.residual},
                        {"component", Json::array({r.component.k1, r.component.k2})},
                        {"repeated", r.repeated}});
    return Json{{"count", rep.records.size()},
                {"max_residual", rep.max_residual},
                {"residuals_ok", rep.residuals_ok},
                {"any_repeated", rep.any_repeated},
                {"records", std::move(recs)}};
}

inline Json to_json(const CriticalPoint& cp) {
    Json modes = Json::array();
    for (const auto& m : cp.crossing_modes) modes.push_back(to_json(m));
    return Json{{"pattern", to_string(cp.pattern)},
                {"a_star", cp.a_star},
                {"theta_N", cp.theta},
                {"K", cp.K.to_string()},
                {"leading", to_json(cp.leading)},
                {"crossing_modes", std::move(modes)},
                {"warnings", to_json(cp.warnings)}};
}

inline Json to_json(const Resonance& r) {
    return Json{{"k", r.k}, {"faster", to_json(r.faster)}, {"slower", to_json(r.slower)},
                {"ratio", r.ratio}};
}

inline Json to_json(const AmplitudeSample& s) {
    return Json{{"a", s.a},
                {"offset", s.offset},
                {"amplitude", s.amplitude},
                {"converged", s.converged},
                {"escaped", s.escaped}};
}

inline Json to_json(const ProbeResult& p) {
    Json u = Json::array();
    for (const auto& s : p.unstable_side) u.push_back(to_json(s));
    return Json{{"criticality", to_string(p.criticality)},
                {"unstable_side", std::move(u)},
                {"stable_side", to_json(p.stable_side)},
                {"slope", p.slope},
                {"intercept", p.intercept},
                {"failed", p.failed},
                {"diagnostics", p.diagnostics}};
}

inline Json to_json(const HopfReport& h) {
    Json res = Json::array();
    for (const auto& r : h.resonances) res.push_back(to_json(r));
    Json j{{"pattern", to_string(h.pattern)},
           {"a_hat", h.a_hat},
           {"a_star", h.a_star},
           {"c", h.c},
           {"mode", to_json(h.mode)},
           {"omega_hopf", h.omega_hopf},
           {"K", h.K.to_string()},
           {"resonances", std::move(res)},
           {"criticality", to_string(h.criticality)},
           {"s_star", h.s_star ? Json(*h.s_star) : Json(nullptr)},
           {"on_axis_count", h.on_axis_count},
           {"others_max_re", h.others_max_re},
           {"ordering_ok", h.ordering_ok},
           {"warnings", to_json(h.warnings)}};
    return j;
}

inline Json to_json(const PhaseEntry& e) {
    return Json{{"sigma", Json::array({e.sigma.r, e.sigma.s})},
                {"theta", e.theta},
                {"numerator", e.numerator},
                {"quantized", e.quantized},
                {"mismatch", e.mismatch}};
}

inline Json to_json(const OrbitSymmetry& o) {
    Json ph = Json::array(), acc = Json::array();
    for (const auto& e : o.phases) ph.push_back(to_json(e));
    for (const auto& e : o.accepted) acc.push_back(to_json(e));
    return Json{{"period", o.period},
                {"H", o.H.to_string()},
                {"K", o.K.to_string()},
                {"phases", std::move(ph)},
                {"accepted", std::move(acc)},
                {"warnings", to_json(o.warnings)}};
}

inline Json to_json(const PeriodicOrbit& o) {
    return Json{{"period", o.period},
                {"anchor_time", o.anchor_time},
                {"residual", o.residual},
                {"amplitude", o.amplitude}};
}

inline Json to_json(const IntegratorStats& s) {
    return Json{{"steps", s.steps},
                {"rejected", s.rejected},
                {"rhs_evals", s.rhs_evals},
                {"max_error", s.max_error}};
}

// CSV
// ---

inline void write_spectrum_csv(std::ostream& os, const SpectrumReport& rep) {
    os << "r,s,branch,re,im,residual,k1,k2,repeated\n";
    for (const auto& r : rep.records)
        os << r.r << ',' << r.s << ',' << to_string(r.branch) << ',' << fmt17(r.lambda.real())
           << ',' << fmt17(r.lambda.imag()) << ',' << fmt17(r.residual) << ',' << r.component.k1
           << ',' << r.component.k2 << ',' << (r.repeated ? 1 : 0) << '\n';
}

/// Header: t, then x_alpha_beta, y_alpha_beta in state order.
inline std::string trajectory_header(int n) {
    std::string h = "t";
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= n; ++i)
            h += ",x_" + std::to_string(i) + "_" + std::to_string(j) + ",y_" + std::to_string(i) +
                 "_" + std::to_string(j);
    return h;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int n) {
    os << trajectory_header(n) << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << fmt17(tr.times[k]);
        for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) os << ',' << fmt17(tr.states[k][i]);
        os << '\n';
    }
}

/// Reads a trajectory CSV; derivatives are recomputed from lp for dense output.
inline Trajectory read_trajectory_csv(std::istream& is, const LatticeParams& lp) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty trajectory file");
    const auto cols = static_cast<long>(std::count(line.begin(), line.end(), ',')) + 1;
    if (cols - 1 != lp.dim())
        throw DimensionError("trajectory has " + std::to_string(cols - 1) +
                             " state columns, lattice needs " + std::to_string(lp.dim()));
    Trajectory tr;
    long row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw IoError("bad number '" + cell + "' on line " + std::to_string(row));
            }
        }
        if (static_cast<long>(vals.size()) != cols)
            throw IoError("line " + std::to_string(row) + " has " + std::to_string(vals.size()) +
                          " fields, expected " + std::to_string(cols));
        Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(vals.data() + 1, cols - 1);
        if (!tr.empty() && !(vals[0] > tr.times.back()))
            throw IoError("times not strictly increasing on line " + std::to_string(row));
        Eigen::VectorXd f;
        rhs_network(y, lp, f);
        tr.push(vals[0], std::move(y), std::move(f));
    }
    if (tr.size() < 2) throw IoError("trajectory needs at least two rows");
    return tr;
}

inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"N",      "a",      "b",     "c",     "gamma",
                                               "delta",  "a_star", "a_hat", "mode_r", "mode_s",
                                               "omega",  "K",      "criticality"};
    return cols;
}

struct SweepRow {
    LatticeParams lp;
    double a_star = 0.0;
    double a_hat = 0.0;
    int mode_r = 0;
    int mode_s = 0;
    double omega = 0.0;
    std::string K;
    Criticality criticality = Criticality::undetermined;
};

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows)
        os << r.lp.n() << ',' << fmt17(r.lp.a()) << ',' << fmt17(r.lp.b()) << ','
           << fmt17(r.lp.c()) << ',' << fmt17(r.lp.gamma()) << ',' << fmt17(r.lp.delta()) << ','
           << fmt17(r.a_star) << ',' << fmt17(r.a_hat) << ',' << r.mode_r << ',' << r.mode_s
           << ',' << fmt17(r.omega) << ',' << r.K << ',' << to_string(r.criticality) << '\n';
}

namespace detail {

inline void write_json(std::string& out, const Json& j, int indent) {
    const std::string pad(2 * (indent + 1), ' '), close(2 * indent, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                write_json(out, it.value(), indent + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write_json(out, j[i], indent + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt17(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// JSON text with a trailing newline; doubles printed with 17 significant
/// digits, non-finite doubles as null.
inline std::string dump_json(const Json& j) {
    std::string out;
    detail::write_json(out, j, 0);
    return out + "\n";
}

/// Writes text to path, or to `fallback` when path is empty.
inline void emit_text(const std::string& text, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace fhntorus
