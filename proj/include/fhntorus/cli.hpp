#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fhntorus/bifurcation.hpp"
#include "fhntorus/criticality.hpp"
#include "fhntorus/errors.hpp"
#include "fhntorus/report.hpp"
#include "fhntorus/selftest.hpp"
#include "fhntorus/simulate.hpp"
#include "fhntorus/spectral.hpp"

namespace fhntorus {

/// Every tolerance the CLI exposes, with its default.
struct ToleranceTable {
    double residual = 1e-10;      // spectrum: |M xi - lambda xi|_inf / |xi|_inf
    double genericity = 1e-12;    // spectrum: coincidence of mode symbols
    double critical = 1e-8;       // critical: numeric vs closed-form a*
    double root = 1e-12;          // hopf: bracket width in a
    double re_axis = 1e-10;       // hopf: |Re lambda| counted as on the axis
    double resonance = 1e-9;      // hopf: relative integer-ratio tolerance
    double rtol = 1e-9;           // integrator relative tolerance
    double atol = 1e-11;          // integrator absolute tolerance
    double transient = 0.5;       // orbit detection: discarded fraction
    double recurrence = 1e-6;     // orbit detection: relative recurrence residual
    double classify = 1e-3;       // classification: relative mismatch
    double isotropy = 1e-9;       // isotropy detection
};

struct RunConfig {
    std::string command;
    int n = 3;
    double a = 0.0, b = 1.0, c = 0.0, gamma = 0.0, delta = 0.0;
    std::string format = "json";
    std::string out;
    ToleranceTable tol;

    LatticeParams lattice() const { return {{a, b, c}, {gamma, delta}, n}; }
};

/// key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("'" + key + "' expects a number, got '" + v + "'");
    }
}

/// "v1,v2,..." or "lo:hi:count" (inclusive linspace).
inline std::vector<double> parse_grid(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string lo, hi, cnt;
        std::getline(ss, lo, ':');
        std::getline(ss, hi, ':');
        std::getline(ss, cnt, ':');
        const double l = parse_double(key, lo), h = parse_double(key, hi);
        const double m = parse_double(key, cnt);
        if (m < 1 || m != std::floor(m)) throw ValidationError("'" + key + "' count must be >= 1");
        const int k = static_cast<int>(m);
        for (int i = 0; i < k; ++i) out.push_back(k == 1 ? l : l + (h - l) * i / (k - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ValidationError("'" + key + "' is empty");
    return out;
}

/// Relative output paths resolve against $FHNTORUS_OUTPUT_DIR when it is set.
inline std::string resolve_output_path(const std::string& path) {
    if (path.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* dir = std::getenv("FHNTORUS_OUTPUT_DIR"); dir && *dir)
        return (std::filesystem::path(dir) / p).string();
    return path;
}

namespace detail {

inline void merge_into(Json& j, const Json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
}

inline void print_warnings(std::ostream& err, const Warnings& ws) {
    for (const auto& w : ws) err << "warning[" << w.code << "]: " << w.message << '\n';
}

inline SweepRow sweep_point(const LatticeParams& lp, bool probe, const ToleranceTable& tol) {
    SweepRow row{lp, 0.0, 0.0, 0, 0, 0.0, {}, Criticality::undetermined};
    HopfOptions ho;
    ho.a_tol = tol.root;
    ho.re_tol = tol.re_axis;
    HopfReport rep = lp.c() > 0.0 ? hopf_crossing(lp, ho) : hopf_at_critical(lp, ho);
    if (probe) rep.criticality = branch_criticality_probe(rep, lp).criticality;
    row.a_star = rep.a_star;
    row.a_hat = rep.a_hat;
    row.mode_r = rep.mode.r;
    row.mode_s = rep.mode.s;
    row.omega = rep.omega_hopf;
    row.K = rep.K.to_string();
    row.criticality = rep.criticality;
    return row;
}

}  // namespace detail

/// Runs one command line (args without the program name). Exit codes:
/// 0 success, 2 input validation error, 3 numerical or I/O failure.
inline int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                              std::ostream& err) {
    CLI::App app{"Hopf bifurcation analysis of an N x N torus of FitzHugh-Nagumo cells", "fhntorus"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    RunConfig cfg;
    std::string config_path;
    auto* o_n = app.add_option("--n", cfg.n, "lattice size N (odd prime)");
    auto* o_a = app.add_option("--a", cfg.a, "cell parameter a");
    auto* o_b = app.add_option("--b", cfg.b, "cell parameter b");
    auto* o_c = app.add_option("--c", cfg.c, "cell parameter c");
    auto* o_g = app.add_option("--gamma", cfg.gamma, "coupling gamma (alpha direction)");
    auto* o_d = app.add_option("--delta", cfg.delta, "coupling delta (beta direction)");
    app.add_option("--config", config_path, "key=value file; flags override it");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.out, "output file (default: standard output)");
    app.add_option("--residual-tol", cfg.tol.residual, "eigen-residual tolerance");
    app.add_option("--genericity-tol", cfg.tol.genericity, "genericity tolerance");
    app.add_option("--critical-tol", cfg.tol.critical, "numeric a* agreement tolerance");
    app.add_option("--root-tol", cfg.tol.root, "root-finder tolerance in a");
    app.add_option("--re-tol", cfg.tol.re_axis, "imaginary-axis tolerance on Re lambda");
    app.add_option("--resonance-tol", cfg.tol.resonance, "relative resonance tolerance");
    app.add_option("--rtol", cfg.tol.rtol, "integrator relative tolerance");
    app.add_option("--atol", cfg.tol.atol, "integrator absolute tolerance");
    app.add_option("--transient", cfg.tol.transient, "discarded transient fraction");
    app.add_option("--recurrence-tol", cfg.tol.recurrence, "relative recurrence threshold");
    app.add_option("--classify-tol", cfg.tol.classify, "relative symmetry mismatch");
    app.add_option("--isotropy-tol", cfg.tol.isotropy, "isotropy detection tolerance");

    auto* spectrum = app.add_subcommand("spectrum", "all 2 N^2 eigenpairs of the origin");
    auto* critical = app.add_subcommand("critical", "critical a* at c = 0 with a numeric cross-check");
    auto* hopf = app.add_subcommand("hopf", "first Hopf crossing (c > 0) or critical report (c = 0)");
    bool hopf_probe = false;
    ProbeSettings probe_set;
    hopf->add_flag("--probe", hopf_probe, "run the branch criticality probe");
    hopf->add_option("--probe-offset", probe_set.offset, "base |a - a_hat| of the probe");
    hopf->add_option("--probe-perturbation", probe_set.perturbation, "initial size / sqrt(b)");
    hopf->add_option("--probe-periods", probe_set.chunk_periods, "periods per chunk");
    hopf->add_option("--probe-chunks", probe_set.max_chunks, "maximum chunks");

    auto* simulate = app.add_subcommand("simulate", "integrate the lattice");
    double t_end = 1000.0, amp = 0.01;
    std::string init = "sync", traj_path, fix_spec;
    unsigned seed = 1;
    bool do_classify = false;
    simulate->add_option("--t-end", t_end, "integration horizon");
    simulate->add_option("--init", init, "initial state")
        ->check(CLI::IsMember({"sync", "random", "eigen"}));
    simulate->add_option("--amp", amp, "initial perturbation size");
    simulate->add_option("--seed", seed, "seed for --init random");
    simulate->add_option("--fix", fix_spec, "integrate inside Fix(K): 1, Gamma or Z(r,s)");
    simulate->add_option("--trajectory", traj_path, "write the trajectory CSV here");
    simulate->add_flag("--classify", do_classify, "detect and classify a periodic orbit");

    auto* classify = app.add_subcommand("classify", "orbit symmetry of a saved trajectory");
    std::string input_path;
    classify->add_option("--input", input_path, "trajectory CSV")->required();

    auto* sweep = app.add_subcommand("sweep", "grid of critical / Hopf reports as CSV");
    std::string ns = "3", gammas, deltas, cs = "0";
    int jobs = 1;
    bool sweep_probe = false;
    sweep->add_option("--ns", ns, "lattice sizes: list or lo:hi:count");
    sweep->add_option("--gammas", gammas, "gamma values: list or lo:hi:count")->required();
    sweep->add_option("--deltas", deltas, "delta values: list or lo:hi:count")->required();
    sweep->add_option("--cs", cs, "c values: list or lo:hi:count");
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--probe", sweep_probe, "run the criticality probe per point");

    auto* selftest = app.add_subcommand("selftest", "run the invariant suites");

    for (auto* sub : {spectrum, critical, hopf, simulate, classify, sweep, selftest})
        sub->fallthrough();

    try {
        std::vector<const char*> argv{"fhntorus"};
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (!config_path.empty()) {
            const auto kv = read_config_file(config_path);
            auto take = [&](const char* key, CLI::Option* opt, double& dst) {
                if (auto it = kv.find(key); it != kv.end() && opt->count() == 0)
                    dst = parse_double(key, it->second);
            };
            take("a", o_a, cfg.a);
            take("b", o_b, cfg.b);
            take("c", o_c, cfg.c);
            take("gamma", o_g, cfg.gamma);
            take("delta", o_d, cfg.delta);
            if (auto it = kv.find("n"); it != kv.end() && o_n->count() == 0) {
                const double v = parse_double("n", it->second);
                if (v != std::floor(v)) throw ValidationError("'n' must be an integer");
                cfg.n = static_cast<int>(v);
            }
            for (const auto& [k, v] : kv)
                if (k != "a" && k != "b" && k != "c" && k != "gamma" && k != "delta" && k != "n")
                    throw ValidationError("unknown config key '" + k + "'");
        }
        const std::string out_path = resolve_output_path(cfg.out);
        const bool csv = cfg.format == "csv";

        if (*selftest) {
            cfg.command = "selftest";
            bool all = true;
            std::ostringstream os;
            for (const auto& r : run_selftest()) {
                all = all && r.passed;
                os << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
                if (!r.passed) os << ": " << r.detail;
                os << '\n';
            }
            emit_text(os.str(), out_path, out);
            return all ? 0 : 3;
        }

        if (*sweep) {
            cfg.command = "sweep";
            std::vector<int> nlist;
            for (double v : parse_grid("ns", ns)) {
                if (v != std::floor(v)) throw ValidationError("'ns' must be integers");
                nlist.push_back(static_cast<int>(v));
            }
            const auto gl = parse_grid("gammas", gammas), dl = parse_grid("deltas", deltas),
                       cl = parse_grid("cs", cs);
            std::vector<LatticeParams> grid;
            for (int n : nlist)
                for (double g : gl)
                    for (double d : dl)
                        for (double c : cl) grid.push_back({{cfg.a, cfg.b, c}, {g, d}, n});
            std::vector<std::optional<SweepRow>> rows(grid.size());
            std::vector<std::string> errors(grid.size());
            std::vector<int> codes(grid.size(), 0);
            std::atomic<std::size_t> next{0};
            auto worker = [&]() {
                for (std::size_t i = next++; i < grid.size(); i = next++) {
                    try {
                        rows[i] = detail::sweep_point(grid[i], sweep_probe, cfg.tol);
                    } catch (const Error& e) {
                        errors[i] = e.what();
                        codes[i] = e.exit_code();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (codes[i] != 0) {
                    err << "error: grid point " << i << ": " << errors[i] << '\n';
                    return codes[i];
                }
            std::vector<SweepRow> done;
            for (auto& r : rows) done.push_back(std::move(*r));
            std::ostringstream os;
            write_sweep_csv(os, done);
            emit_text(os.str(), out_path, out);
            return 0;
        }

        const LatticeParams lp = cfg.lattice();

        if (*spectrum) {
            cfg.command = "spectrum";
            SpectrumOptions so;
            so.residual_tol = cfg.tol.residual;
            so.keep_vectors = false;
            const SpectrumReport rep = spectrum_report(lp, so);
            const auto viol = genericity_violations(lp, cfg.tol.genericity);
            const Warnings ws = coupling_warnings(lp);
            detail::print_warnings(err, ws);
            if (csv) {
                std::ostringstream os;
                write_spectrum_csv(os, rep);
                emit_text(os.str(), out_path, out);
            } else {
                Json j{{"command", "spectrum"}, {"params", to_json(lp)}};
                detail::merge_into(j, to_json(rep));
                j["genericity_violations"] = viol.size();
                j["warnings"] = to_json(ws);
                emit_text(dump_json(j), out_path, out);
            }
            if (!rep.residuals_ok) {
                err << "error: eigen-residual " << fmt17(rep.max_residual) << " exceeds tolerance\n";
                return 3;
            }
            return 0;
        }

        if (*critical) {
            cfg.command = "critical";
            const CriticalPoint cp = critical_a(lp);
            const double a_num = numeric_critical_a(lp, cp.a_star - 1.0, cp.a_star + 1.0);
            const bool agrees = std::abs(a_num - cp.a_star) <= cfg.tol.critical;
            detail::print_warnings(err, cp.warnings);
            if (csv) {
                std::ostringstream os;
                os << "N,b,gamma,delta,pattern,a_star,numeric_a_star,K\n"
                   << lp.n() << ',' << fmt17(lp.b()) << ',' << fmt17(lp.gamma()) << ','
                   << fmt17(lp.delta()) << ',' << to_string(cp.pattern) << ',' << fmt17(cp.a_star)
                   << ',' << fmt17(a_num) << ',' << cp.K.to_string() << '\n';
                emit_text(os.str(), out_path, out);
            } else {
                Json j{{"command", "critical"}, {"params", to_json(lp)}};
                detail::merge_into(j, to_json(cp));
                j["numeric_a_star"] = a_num;
                j["numeric_agrees"] = agrees;
                emit_text(dump_json(j), out_path, out);
            }
            if (!agrees) {
                err << "error: numeric a* disagrees with the closed form\n";
                return 3;
            }
            return 0;
        }

        if (*hopf) {
            cfg.command = "hopf";
            HopfOptions ho;
            ho.a_tol = cfg.tol.root;
            ho.re_tol = cfg.tol.re_axis;
            HopfReport rep = lp.c() > 0.0 ? hopf_crossing(lp, ho) : hopf_at_critical(lp, ho);
            std::optional<ProbeResult> probe;
            if (hopf_probe) {
                probe = branch_criticality_probe(rep, lp, probe_set);
                rep.criticality = probe->criticality;
            }
            detail::print_warnings(err, rep.warnings);
            if (csv) {
                std::ostringstream os;
                write_sweep_csv(os, {SweepRow{lp, rep.a_star, rep.a_hat, rep.mode.r, rep.mode.s,
                                              rep.omega_hopf, rep.K.to_string(), rep.criticality}});
                emit_text(os.str(), out_path, out);
            } else {
                Json j{{"command", "hopf"}, {"params", to_json(lp)}};
                detail::merge_into(j, to_json(rep));
                if (probe) j["probe"] = to_json(*probe);
                emit_text(dump_json(j), out_path, out);
            }
            if (probe && probe->failed) {
                err << "error: probe failed: " << probe->diagnostics << '\n';
                return 3;
            }
            return 0;
        }

        IntegrateOptions io;
        io.tol.rtol = cfg.tol.rtol;
        io.tol.atol = cfg.tol.atol;
        OrbitSettings os_set;
        os_set.transient_fraction = cfg.tol.transient;
        os_set.recurrence_tol = cfg.tol.recurrence;
        ClassifySettings cs_set;
        cs_set.tol = cfg.tol.classify;

        if (*simulate) {
            cfg.command = "simulate";
            StateVector z0(lp.n());
            if (init == "sync") {
                z0 = StateVector::synchronized(lp.n(), amp, 0.0);
            } else if (init == "random") {
                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> u(-amp, amp);
                for (Eigen::Index i = 0; i < z0.size(); ++i) z0.data()[i] = u(rng);
            } else {
                const LeadingEigenvalue le = leading_eigenvalue(lp);
                Eigen::VectorXd v = analytic_eigenvector(le.r, le.s, le.branch, lp).real();
                z0 = StateVector(lp.n(), amp * v / v.lpNorm<Eigen::Infinity>());
            }
            std::optional<Subgroup> fixK;
            if (!fix_spec.empty()) {
                fixK = parse_subgroup(fix_spec, lp.n());
                z0 = project_fix(*fixK, z0);
            }
            const Trajectory tr = fixK ? reduced_integrate_fix(*fixK, z0, lp, t_end, io)
                                       : integrate(z0, lp, t_end, io);
            if (!traj_path.empty()) {
                std::ostringstream ts;
                write_trajectory_csv(ts, tr, lp.n());
                emit_text(ts.str(), resolve_output_path(traj_path), out);
            }
            Json j{{"command", "simulate"},
                   {"params", to_json(lp)},
                   {"t_end", t_end},
                   {"init", init},
                   {"fix", fixK ? Json(fixK->to_string()) : Json(nullptr)},
                   {"stats", to_json(tr.stats)},
                   {"final_state_max_abs", tr.states.back().lpNorm<Eigen::Infinity>()}};
            if (do_classify) {
                const auto orb = detect_periodic_orbit(tr, lp.n(), os_set);
                j["orbit"] = orb ? to_json(*orb) : Json(nullptr);
                j["classification"] = orb ? to_json(classify_spatiotemporal(orb, cs_set)) : Json(nullptr);
            }
            if (csv) {
                if (traj_path.empty()) {
                    std::ostringstream ts;
                    write_trajectory_csv(ts, tr, lp.n());
                    emit_text(ts.str(), out_path, out);
                }
            } else {
                emit_text(dump_json(j), out_path, out);
            }
            return 0;
        }

        if (*classify) {
            cfg.command = "classify";
            std::ifstream f(input_path);
            if (!f) throw IoError("cannot read trajectory '" + input_path + "'");
            const Trajectory tr = read_trajectory_csv(f, lp);
            const auto orb = detect_periodic_orbit(tr, lp.n(), os_set);
            if (!orb) {
                err << "error: no periodic orbit detected in '" << input_path << "'\n";
                return 3;
            }
            const OrbitSymmetry sym = classify_spatiotemporal(orb, cs_set);
            detail::print_warnings(err, sym.warnings);
            Json j{{"command", "classify"}, {"params", to_json(lp)}, {"orbit", to_json(*orb)}};
            detail::merge_into(j, to_json(sym));
            emit_text(dump_json(j), out_path, out);
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}

}  // namespace fhntorus
