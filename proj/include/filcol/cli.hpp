#pragma once

// Command-line front end. Parsing, dispatch and serialization live here so the
// tests can drive the commands in-process; tools/filcol.cpp is a thin main().

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "analysis.hpp"
#include "battery.hpp"
#include "collision.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "integrator.hpp"
#include "types.hpp"

namespace filcol::cli {

using ojson = nlohmann::ordered_json;

enum class Command { Classify, Simulate, GammaStar, ThetaStar, Sweep, Verify };
enum class Format { Csv, Json };

struct Grid {
    double theta_min = -2.0;
    double theta_max = 4.0;
    double w_min = -2.0;
    double w_max = 2.0;
    int n_theta = 50;
    int n_w = 50;
};

struct RunConfig {
    Command command = Command::Classify;
    double alpha = 0.2;
    double gamma = 1.0;
    std::optional<FullState> full;
    std::optional<ReducedState> reduced;
    std::optional<double> h0;
    Grid grid{};
    IntegrationConfig integration{};
    double t_end = kDefaultOracleHorizon;
    double eps_w = 1e-8;
    double eps_r = 1e-8;
    bool with_oracle = false;
    std::vector<std::string> checks = battery_ids();
    std::string output_path = "-";
    Format format = Format::Json;
};

inline int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::NumericalFailure:
    case ErrorCode::StepLimitExceeded:
    case ErrorCode::EmptyTrajectory:
    case ErrorCode::OffLevelSet:
        return 3;
    default:
        return 2;
    }
}

// --- formatting --------------------------------------------------------------------

/// Shortest decimal that round-trips.
inline std::string fmt(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline ojson num_or_null(std::optional<double> x) {
    if (x && std::isfinite(*x)) return *x;
    return nullptr;
}

// --- atomic output -----------------------------------------------------------------

/// Writes to a sibling temp file, then renames over `path`. `before_rename` lets
/// tests inject a failure between the two.
inline void write_atomic(const std::filesystem::path& path, const std::string& content,
                         const std::function<void(const std::filesystem::path&)>& before_rename = {}) {
    std::random_device rd;
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(rd());
    try {
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw Error(ErrorCode::ConfigInvalid, "cannot open " + tmp.string() + " for writing");
            f << content;
            f.flush();
            if (!f) throw Error(ErrorCode::NumericalFailure, "write to " + tmp.string() + " failed");
        }
        if (before_rename) before_rename(tmp);
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

// --- orientation -------------------------------------------------------------------

/// Inputs with gamma < 1 are relabelled (swap filaments, reflect z) so that the
/// analysis always sees gamma >= 1. Times map back by 1/gamma_input.
struct Oriented {
    Params params;
    bool swapped = false;
    double gamma_input = 1.0;
    double time_scale = 1.0;    // input time = normalized time * time_scale
    double theta_shift = 0.0;   // input theta = normalized theta - theta_shift
    std::optional<ReducedState> reduced;     // normalized
    std::optional<HyperbolicState> hyperbolic;
    std::optional<double> d;                  // for full inputs
};

inline Oriented orient(const RunConfig& cfg) {
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma))
        throw Error(ErrorCode::DomainError, "gamma must be positive");
    const bool swapped = cfg.gamma < 1.0;
    const double g = swapped ? 1.0 / cfg.gamma : cfg.gamma;
    Oriented o{Params(cfg.alpha, g)};
    o.swapped = swapped;
    o.gamma_input = cfg.gamma;
    o.time_scale = swapped ? g : 1.0;
    o.theta_shift = swapped ? 0.5 * std::log(cfg.gamma) : 0.0;  // R1' = R2 = sqrt(gamma) R1
    if (cfg.reduced) {
        o.reduced = ReducedState{cfg.reduced->theta + o.theta_shift, cfg.reduced->w};
    } else if (cfg.full) {
        FullState fs = *cfg.full;
        if (!fs.valid()) throw Error(ErrorCode::InvalidInitialState, "full state needs r1, r2 > 0 and finite values");
        if (swapped) fs = FullState{fs.r2, -fs.z2, fs.r1, -fs.z1};
        o.d = conserved_d(fs, o.params);
        const auto red = reduce(fs, o.params);
        if (const auto* rs = std::get_if<ReducedState>(&red))
            o.reduced = *rs;
        else
            o.hyperbolic = std::get<HyperbolicState>(red);
    }
    return o;
}

inline ojson orientation_json(const Oriented& o) {
    ojson j;
    j["swapped"] = o.swapped;
    j["gamma_input"] = o.gamma_input;
    j["gamma_normalized"] = o.params.gamma();
    j["time_scale"] = o.time_scale;
    if (o.swapped)
        j["note"] = "gamma < 1: filaments relabelled and z reflected; h0 refers to the relabelled pair";
    return j;
}

inline const ReducedState& require_reduced(const Oriented& o, std::string_view command) {
    if (o.hyperbolic)
        throw Error(ErrorCode::InvalidInitialState,
                    std::string(command) + ": full state has d = " + fmt(*o.d) +
                        " != 0; filaments with d != 0 never collide (use simulate for the trajectory)");
    if (!o.reduced)
        throw Error(ErrorCode::ConfigInvalid,
                    std::string(command) + " needs an initial state (--theta0/--w0 or --r1/--z1/--r2/--z2)");
    return *o.reduced;
}

// --- commands ----------------------------------------------------------------------

struct Row {
    double theta0;
    double w0;
    std::string verdict;
    double h0;
    std::optional<double> t_estimate;
    std::optional<std::string> oracle;
    std::optional<double> t_oracle;
    std::optional<bool> agree;
};

inline bool oracle_agrees(Verdict v, CollisionOutcome o) {
    if (is_collision(v)) return o == CollisionOutcome::Collided;
    if (v == Verdict::GlobalPassThrough || v == Verdict::EquilibriumRest) return o == CollisionOutcome::Survived;
    return o == CollisionOutcome::Survived || o == CollisionOutcome::NonMonotoneCollapse;
}

inline Row classify_row(const ReducedState& input, const Oriented& o, const RunConfig& cfg, bool oracle) {
    const ReducedState rs{input.theta + o.theta_shift, input.w};
    const auto mc = classify(rs, o.params);
    Row row{input.theta, input.w, std::string(to_string(mc.verdict)), mc.h0, std::nullopt};
    if (is_collision(mc.verdict)) row.t_estimate = collision_time(rs, o.params).value * o.time_scale;
    if (oracle) {
        const auto run = simulate_until_collision(rs, o.params, cfg.integration, cfg.eps_w, cfg.eps_r, cfg.t_end);
        row.oracle = std::string(to_string(run.outcome));
        row.t_oracle = run.time * o.time_scale;
        row.agree = oracle_agrees(mc.verdict, run.outcome);
    }
    return row;
}

inline std::string csv_row(const Row& r) {
    std::string s = fmt(r.theta0) + "," + fmt(r.w0) + "," + r.verdict + "," + fmt(r.h0) + ",";
    if (r.t_estimate) s += fmt(*r.t_estimate);
    if (r.oracle) {
        s += "," + *r.oracle + "," + fmt(*r.t_oracle) + "," + (*r.agree ? "true" : "false");
    }
    return s + "\n";
}

inline ojson row_json(const Row& r) {
    ojson j;
    j["theta0"] = r.theta0;
    j["w0"] = r.w0;
    j["verdict"] = r.verdict;
    j["h0"] = r.h0;
    j["t_estimate"] = num_or_null(r.t_estimate);
    if (r.oracle) {
        j["oracle"] = *r.oracle;
        j["t_oracle"] = num_or_null(r.t_oracle);
        j["agree"] = *r.agree;
    }
    return j;
}

inline std::string csv_header(bool oracle) {
    return oracle ? "theta0,w0,verdict,h0,t_estimate,oracle,t_oracle,agree\n"
                  : "theta0,w0,verdict,h0,t_estimate\n";
}

inline std::string input_label(const Oriented& o, const ReducedState& rs) {
    return "(" + fmt(rs.theta - o.theta_shift) + ", " + fmt(rs.w) + ")";
}

inline std::string cmd_classify(const RunConfig& cfg) {
    const Oriented o = orient(cfg);
    const ReducedState& rs = require_reduced(o, "classify");
    const ReducedState input{rs.theta - o.theta_shift, rs.w};
    const auto mc = classify(rs, o.params);
    if (cfg.format == Format::Csv) return csv_header(false) + csv_row(classify_row(input, o, cfg, false));

    ojson j;
    j["alpha"] = cfg.alpha;
    j["gamma"] = cfg.gamma;
    j["theta0"] = input.theta;
    j["w0"] = input.w;
    j["verdict"] = to_string(mc.verdict);
    j["regime"] = to_string(mc.regime);
    j["h0"] = mc.h0;
    j["gamma_star"] = mc.gamma_star;
    j["theta_star"] = mc.theta_star ? ojson(*mc.theta_star - o.theta_shift) : ojson(nullptr);
    if (is_collision(mc.verdict)) {
        const auto est = collision_time(rs, o.params);
        j["t_estimate"] = est.value * o.time_scale;
        j["estimate_kind"] = to_string(est.kind);
        j["formula"] = to_string(est.formula);
        ojson c = ojson::object();
        for (const auto& [k, v] : est.constants) c[k] = v;
        j["constants"] = c;
    } else {
        j["t_estimate"] = nullptr;
    }
    j["orientation"] = orientation_json(o);
    return j.dump(2) + "\n";
}

inline std::string cmd_gamma_star(const RunConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
    const auto gs = solve_gamma_star(cfg.alpha);
    if (cfg.format == Format::Csv)
        return "alpha,gamma_star,eta_star,residual\n" + fmt(cfg.alpha) + "," + fmt(gs.gamma) + "," +
               fmt(gs.eta) + "," + fmt(gs.residual) + "\n";
    ojson j;
    j["alpha"] = cfg.alpha;
    j["gamma_star"] = gs.gamma;
    j["eta_star"] = gs.eta;
    j["residual"] = gs.residual;
    return j.dump(2) + "\n";
}

inline std::string cmd_theta_star(const RunConfig& cfg) {
    const Oriented o = orient(cfg);
    double h0 = 0.0;
    if (cfg.h0) {
        h0 = *cfg.h0;
    } else {
        h0 = hamiltonian(require_reduced(o, "theta-star"), o.params);
    }
    const double ts = theta_star(o.params, h0) - o.theta_shift;
    if (cfg.format == Format::Csv)
        return "alpha,gamma,h0,theta_star\n" + fmt(cfg.alpha) + "," + fmt(cfg.gamma) + "," + fmt(h0) + "," +
               fmt(ts) + "\n";
    ojson j;
    j["alpha"] = cfg.alpha;
    j["gamma"] = cfg.gamma;
    j["h0"] = h0;
    j["theta_star"] = ts;
    j["orientation"] = orientation_json(o);
    return j.dump(2) + "\n";
}

inline std::string simulate_hyperbolic(const RunConfig& cfg, const Oriented& o) {
    const HyperbolicState hs = *o.hyperbolic;
    const auto cert = no_collision_certificate(hs, o.params);
    const auto tr = integrate(hs, o.params, cfg.t_end, cfg.integration);
    double min_sep = 1e300;
    for (const auto& s : tr.states) min_sep = std::min(min_sep, hyperbolic_separation({s[0], s[1], hs.d}, o.params));
    if (cfg.format == Format::Csv) {
        std::string out = "t,theta,w\n";
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            out += fmt(tr.times[i] * o.time_scale) + "," + fmt(tr.states[i][0]) + "," + fmt(tr.states[i][1]) + "\n";
        return out;
    }
    ojson j;
    j["alpha"] = cfg.alpha;
    j["gamma"] = cfg.gamma;
    j["d"] = hs.d;
    j["outcome"] = "NoCollision";
    j["t_collision"] = nullptr;
    j["t_stop"] = tr.times.back() * o.time_scale;
    j["integration"] = to_string(tr.outcome);
    j["certificate_min_separation"] = cert.min_separation;
    j["observed_min_separation"] = min_sep;
    ojson drift;
    for (const auto& [k, v] : tr.drift) drift[k] = v;
    j["drift"] = drift;
    j["orientation"] = orientation_json(o);
    ojson t = ojson::array(), th = ojson::array(), w = ojson::array();
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        t.push_back(tr.times[i] * o.time_scale);
        th.push_back(tr.states[i][0]);
        w.push_back(tr.states[i][1]);
    }
    j["trajectory"] = {{"t", t}, {"theta", th}, {"w", w}};
    j["note"] = "theta is the hyperbolic coordinate of the d != 0 level set";
    return j.dump(2) + "\n";
}

inline std::string cmd_simulate(const RunConfig& cfg) {
    const Oriented o = orient(cfg);
    if (o.hyperbolic) return simulate_hyperbolic(cfg, o);
    const ReducedState& rs = require_reduced(o, "simulate");
    const auto run = simulate_until_collision(rs, o.params, cfg.integration, cfg.eps_w, cfg.eps_r, cfg.t_end);
    const auto& tr = run.trajectory;
    if (cfg.format == Format::Csv) {
        std::string out = "t,theta,w\n";
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            out += fmt(tr.times[i] * o.time_scale) + "," + fmt(tr.states[i][0] - o.theta_shift) + "," +
                   fmt(tr.states[i][1]) + "\n";
        return out;
    }
    ojson j;
    j["alpha"] = cfg.alpha;
    j["gamma"] = cfg.gamma;
    j["theta0"] = rs.theta - o.theta_shift;
    j["w0"] = rs.w;
    j["outcome"] = to_string(run.outcome);
    j["t_collision"] = run.outcome == CollisionOutcome::Collided ? ojson(run.time * o.time_scale) : ojson(nullptr);
    j["t_stop"] = tr.times.back() * o.time_scale;
    j["steps"] = tr.step_sizes.size();
    ojson drift;
    for (const auto& [k, v] : tr.drift) drift[k] = v;
    j["drift"] = drift;
    ojson events = ojson::array();
    for (const auto& e : tr.events)
        events.push_back({{"kind", to_string(e.spec.kind)},
                          {"t", e.t * o.time_scale},
                          {"theta", e.state[0] - o.theta_shift},
                          {"w", e.state[1]}});
    j["events"] = events;
    j["orientation"] = orientation_json(o);
    ojson t = ojson::array(), th = ojson::array(), w = ojson::array();
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        t.push_back(tr.times[i] * o.time_scale);
        th.push_back(tr.states[i][0] - o.theta_shift);
        w.push_back(tr.states[i][1]);
    }
    j["trajectory"] = {{"t", t}, {"theta", th}, {"w", w}};
    return j.dump(2) + "\n";
}

inline unsigned sweep_threads(std::size_t nodes) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FILCOL_THREADS")) {
        unsigned cap = 0;
        const std::string_view sv(env);
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
        if (ec != std::errc() || ptr != sv.data() + sv.size() || cap == 0)
            throw Error(ErrorCode::ConfigInvalid, "FILCOL_THREADS must be a positive integer");
        n = std::min(n, cap);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(nodes, 1)));
}

inline std::vector<Row> sweep_rows(const RunConfig& cfg) {
    const Grid& g = cfg.grid;
    if (g.n_theta < 2 || g.n_w < 2) throw Error(ErrorCode::ConfigInvalid, "grid counts must be >= 2");
    if (!(g.theta_min < g.theta_max) || !(g.w_min < g.w_max))
        throw Error(ErrorCode::ConfigInvalid, "grid ranges must be increasing");
    const Oriented o = orient(cfg);
    const std::size_t total = std::size_t(g.n_theta) * std::size_t(g.n_w);
    std::vector<Row> rows(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto work = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            const std::size_t i = idx / g.n_w;
            const std::size_t jw = idx % g.n_w;
            const ReducedState input{g.theta_min + (g.theta_max - g.theta_min) * double(i) / (g.n_theta - 1),
                                     g.w_min + (g.w_max - g.w_min) * double(jw) / (g.n_w - 1)};
            try {
                rows[idx] = classify_row(input, o, cfg, cfg.with_oracle);
            } catch (const Error& e) {
                std::lock_guard lock(failure_mu);
                if (!failure)
                    failure = std::make_exception_ptr(
                        Error(e.code(), "grid node " + input_label(o, {input.theta + o.theta_shift, input.w}) +
                                            ": " + e.what()));
                next = total;
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = total;
            }
        }
    };
    const unsigned nt = sweep_threads(total);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

inline std::string cmd_sweep(const RunConfig& cfg, std::ostream& diag) {
    const auto rows = sweep_rows(cfg);
    std::size_t agree = 0;
    for (const auto& r : rows)
        if (r.agree && *r.agree) ++agree;
    const double rate = rows.empty() ? 1.0 : double(agree) / double(rows.size());
    if (cfg.with_oracle) diag << "oracle agreement: " << agree << "/" << rows.size() << "\n";
    if (cfg.format == Format::Csv) {
        std::string out = csv_header(cfg.with_oracle);
        for (const auto& r : rows) out += csv_row(r);
        return out;
    }
    ojson j;
    j["alpha"] = cfg.alpha;
    j["gamma"] = cfg.gamma;
    j["grid"] = {{"theta_min", cfg.grid.theta_min}, {"theta_max", cfg.grid.theta_max},
                 {"w_min", cfg.grid.w_min},         {"w_max", cfg.grid.w_max},
                 {"n_theta", cfg.grid.n_theta},     {"n_w", cfg.grid.n_w}};
    j["orientation"] = orientation_json(orient(cfg));
    ojson arr = ojson::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    j["rows"] = arr;
    if (cfg.with_oracle) j["oracle"] = {{"nodes", rows.size()}, {"agree", agree}, {"agreement_rate", rate}};
    return j.dump(2) + "\n";
}

inline std::string cmd_verify(const RunConfig& cfg, std::ostream& diag) {
    for (const auto& id : cfg.checks)
        if (std::find(battery_ids().begin(), battery_ids().end(), id) == battery_ids().end())
            throw Error(ErrorCode::ConfigInvalid, "unknown check '" + id + "'");
    BatteryOptions opts;
    opts.integration = cfg.integration;
    const auto results = run_battery(cfg.checks, opts);
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed && !r.informational) ++failed;
    diag << "verify: " << results.size() << " checks, " << failed << " acceptance failures\n";
    if (cfg.format == Format::Csv) {
        std::string out = "id,passed,informational,seconds\n";
        for (const auto& r : results)
            out += r.id + "," + (r.passed ? "true" : "false") + "," + (r.informational ? "true" : "false") + "," +
                   fmt(r.seconds) + "\n";
        return out;
    }
    ojson j;
    ojson checks = ojson::array();
    for (const auto& r : results) {
        ojson c;
        c["id"] = r.id;
        c["title"] = r.title;
        c["passed"] = r.passed;
        c["informational"] = r.informational;
        ojson m = ojson::object();
        for (const auto& [k, v] : r.measured) m[k] = v;
        c["measured"] = m;
        if (!r.note.empty()) c["note"] = r.note;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["summary"] = {{"total", results.size()}, {"acceptance_failures", failed}};
    return j.dump(2) + "\n";
}

inline std::string execute(const RunConfig& cfg, std::ostream& diag) {
    cfg.integration.validate();
    if (!(cfg.t_end > 0.0)) throw Error(ErrorCode::ConfigInvalid, "t-end must be positive");
    switch (cfg.command) {
    case Command::Classify: return cmd_classify(cfg);
    case Command::Simulate: return cmd_simulate(cfg);
    case Command::GammaStar: return cmd_gamma_star(cfg);
    case Command::ThetaStar: return cmd_theta_star(cfg);
    case Command::Sweep: return cmd_sweep(cfg, diag);
    case Command::Verify: return cmd_verify(cfg, diag);
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown command");
}

/// Runs one command and writes its artifact. Returns the process exit status.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const std::string content = execute(cfg, err);
        if (cfg.output_path == "-")
            out << content << std::flush;
        else
            write_atomic(cfg.output_path, content);
        return 0;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

// --- argument parsing --------------------------------------------------------------

struct Parsed {
    std::optional<RunConfig> config;  // empty when help was printed
    int exit_status = 0;
};

inline std::vector<std::string> split_checks(const std::string& s) {
    std::vector<std::string> out;
    if (s == "all") return battery_ids();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline Parsed parse(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"filcol: coaxial vortex filament collision analysis"};
    app.set_config("--config", "", "flat key=value file mirroring the long flags; flags win");
    app.allow_config_extras(false);

    RunConfig cfg;
    std::string command;
    std::optional<double> theta0, w0, r1, z1, r2, z2;
    std::string format, checks = "all";

    const std::map<std::string, Command> commands{
        {"classify", Command::Classify}, {"simulate", Command::Simulate},   {"gamma-star", Command::GammaStar},
        {"theta-star", Command::ThetaStar}, {"sweep", Command::Sweep}, {"verify", Command::Verify}};

    app.add_option("command", command, "classify | simulate | gamma-star | theta-star | sweep | verify")
        ->required()
        ->check(CLI::IsMember(std::set<std::string>{"classify", "simulate", "gamma-star", "theta-star", "sweep",
                                                    "verify"}));
    app.add_option("--alpha", cfg.alpha, "interaction coefficient in (0, 1)");
    app.add_option("--gamma", cfg.gamma, "circulation ratio (values < 1 are relabelled)");
    app.add_option("--theta0", theta0, "reduced state: log R1");
    app.add_option("--w0", w0, "reduced state: z1 - z2");
    app.add_option("--r1", r1);
    app.add_option("--z1", z1);
    app.add_option("--r2", r2);
    app.add_option("--z2", z2);
    app.add_option("--h0", cfg.h0, "level value for theta-star");
    app.add_option("--theta-min", cfg.grid.theta_min);
    app.add_option("--theta-max", cfg.grid.theta_max);
    app.add_option("--w-min", cfg.grid.w_min);
    app.add_option("--w-max", cfg.grid.w_max);
    app.add_option("--n-theta", cfg.grid.n_theta);
    app.add_option("--n-w", cfg.grid.n_w);
    app.add_flag("--with-oracle", cfg.with_oracle, "sweep: also integrate every node");
    app.add_option("--rel-tol", cfg.integration.rel_tol);
    app.add_option("--abs-tol", cfg.integration.abs_tol);
    app.add_option("--max-steps", cfg.integration.max_steps);
    app.add_option("--h-init", cfg.integration.h_init);
    app.add_option("--h-min", cfg.integration.h_min);
    app.add_option("--t-end", cfg.t_end, "integration horizon");
    app.add_option("--eps-w", cfg.eps_w);
    app.add_option("--eps-r", cfg.eps_r);
    app.add_option("--checks", checks, "verify: comma separated check ids, 'all', or empty");
    app.add_option("--format", format)->check(CLI::IsMember(std::set<std::string>{"csv", "json"}));
    app.add_option("-o,--output", cfg.output_path, "output file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return {std::nullopt, app.exit(e, out, err)};
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return {std::nullopt, 2};
    }

    cfg.command = commands.at(command);
    const bool any_reduced = theta0 || w0;
    const bool any_full = r1 || z1 || r2 || z2;
    if (any_reduced && any_full) {
        err << "error: give either --theta0/--w0 or --r1/--z1/--r2/--z2, not both\n";
        return {std::nullopt, 2};
    }
    if (any_reduced) {
        if (!(theta0 && w0)) {
            err << "error: reduced state needs both --theta0 and --w0\n";
            return {std::nullopt, 2};
        }
        cfg.reduced = ReducedState{*theta0, *w0};
    }
    if (any_full) {
        if (!(r1 && z1 && r2 && z2)) {
            err << "error: full state needs --r1 --z1 --r2 --z2\n";
            return {std::nullopt, 2};
        }
        cfg.full = FullState{*r1, *z1, *r2, *z2};
    }
    if (format.empty())
        cfg.format = (cfg.command == Command::Sweep || cfg.command == Command::Simulate) ? Format::Csv : Format::Json;
    else
        cfg.format = format == "csv" ? Format::Csv : Format::Json;
    cfg.checks = split_checks(checks);
    return {cfg, 0};
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    const Parsed parsed = parse(argc, argv, out, err);
    if (!parsed.config) return parsed.exit_status;
    return run(*parsed.config, out, err);
}

} // namespace filcol::cli
