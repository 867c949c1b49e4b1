// loopsim CLI: experiment runner around the core library. One self-describing
// JSON config per run; flags only override config values. Exit codes:
//   0 success, 2 config/schema problem, 3 numerical failure,
//   4 physics-domain violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "loopsim/dynamic_solver.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/estimation.hpp"
#include "loopsim/json_io.hpp"
#include "loopsim/schrodinger_oracle.hpp"
#include "loopsim/selftest.hpp"
#include "loopsim/static_interferometer.hpp"
#include "loopsim/trajectory.hpp"
#include "loopsim/wilson_loop.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr int kExitDomain = 4;

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_, const std::string& message)
        : std::runtime_error(message), field(std::move(field_)) {}
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void fail(int exit_code, const std::string& code, const std::string& message,
                       const std::string& field = "") {
    ordered_json doc;
    doc["error"]["code"] = code;
    doc["error"]["exit"] = exit_code;
    doc["error"]["message"] = message;
    if (!field.empty()) doc["error"]["field"] = field;
    std::cout << doc.dump(2) << "\n";
    std::exit(exit_code);
}

const ordered_json& require(const ordered_json& doc, const std::string& key,
                            const std::string& context) {
    if (!doc.is_object() || !doc.contains(key))
        throw ConfigError(context.empty() ? key : context + "." + key, "missing required field");
    return doc.at(key);
}

double require_number(const ordered_json& doc, const std::string& key, const std::string& context) {
    const auto& v = require(doc, key, context);
    if (!v.is_number())
        throw ConfigError(context.empty() ? key : context + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const ordered_json& doc, const std::string& key, double fallback) {
    if (!doc.is_object() || !doc.contains(key)) return fallback;
    return doc.at(key).get<double>();
}

loopsim::TrajectorySpec trajectory_from_doc(const ordered_json& doc, const std::string& context) {
    try {
        return loopsim::trajectory_from_json(doc.dump());
    } catch (const loopsim::ValidationError& e) {
        throw ConfigError(context, e.what());
    }
}

loopsim::PathPair pair_from_config(const ordered_json& cfg) {
    const auto& paths = require(cfg, "paths", "");
    loopsim::TrajectorySpec up = trajectory_from_doc(require(paths, "up", "paths"), "paths.up");
    loopsim::TrajectorySpec down =
        trajectory_from_doc(require(paths, "down", "paths"), "paths.down");
    try {
        return loopsim::PathPair(std::move(up), std::move(down));
    } catch (const loopsim::ValidationError& e) {
        throw ConfigError("paths", e.what());
    }
}

loopsim::StaticConfig static_config(const ordered_json& cfg) {
    const auto& phys = require(cfg, "physics", "");
    loopsim::StaticConfig out;
    out.gamma = require_number(phys, "gamma", "physics");
    out.x0 = require_number(phys, "x0", "physics");
    out.T = require_number(phys, "T", "physics");
    out.beta = number_or(phys, "beta", 1.0);
    try {
        out.validate();
    } catch (const loopsim::ValidationError& e) {
        throw ConfigError("physics", e.what());
    }
    return out;
}

loopsim::DynamicConfig dynamic_config(const ordered_json& cfg) {
    const auto& phys = require(cfg, "physics", "");
    loopsim::DynamicConfig out;
    out.m = require_number(phys, "m", "physics");
    out.omega = require_number(phys, "omega", "physics");
    out.gamma = require_number(phys, "gamma", "physics");
    out.x0 = require_number(phys, "x0", "physics");
    out.T = require_number(phys, "T", "physics");
    try {
        out.validate();
    } catch (const loopsim::ValidationError& e) {
        throw ConfigError("physics", e.what());
    }
    return out;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(kExitNumerics, "io", "cannot write " + path.string());
    os << content;
}

void write_fringe_csv(const fs::path& path,
                      const std::vector<std::array<double, 4>>& rows) {
    std::ostringstream os;
    os << "area,P_up,P_down,visibility\n";
    for (const auto& r : rows)
        os << fmt(r[0]) << ',' << fmt(r[1]) << ',' << fmt(r[2]) << ',' << fmt(r[3]) << '\n';
    write_text(path, os.str());
}

// ---------------------------------------------------------------------------
// Scenarios

void run_static(const ordered_json& cfg, const fs::path& out_dir) {
    const loopsim::StaticConfig phys = static_config(cfg);
    const loopsim::PathPair pair = pair_from_config(cfg);
    const loopsim::ValidationReport report = loopsim::validate(pair, phys.x0);
    if (!report.valid())
        throw loopsim::ValidationError("invalid path pair: " + report.issues.front().constraint);

    const loopsim::StaticRunResult result = loopsim::static_run(phys, pair);
    write_text(out_dir / "static_result.json", loopsim::static_result_to_json(result));
    write_fringe_csv(out_dir / "fringe.csv", {{result.area, result.p_up, result.p_down, 1.0}});
    std::cout << "static-run: area=" << fmt(result.area) << " P_up=" << fmt(result.p_up) << "\n";
}

void run_dynamic(const ordered_json& cfg, const fs::path& out_dir) {
    const loopsim::DynamicConfig phys = dynamic_config(cfg);
    const loopsim::PathPair pair = pair_from_config(cfg);
    const loopsim::ValidationReport report = loopsim::validate(pair, phys.x0);
    if (!report.valid())
        throw loopsim::ValidationError("invalid path pair: " + report.issues.front().constraint);

    const double tol = number_or(cfg.contains("numerics") ? cfg.at("numerics") : ordered_json{},
                                 "solver_tol", 1e-10);
    const loopsim::BranchState up = loopsim::solve_branch(phys, pair.up(), tol);
    const loopsim::BranchState down = loopsim::solve_branch(phys, pair.down(), tol);
    const loopsim::InterferenceResult result = loopsim::interference(up, down);
    const loopsim::AdiabaticityMargin margin = loopsim::adiabaticity_margin(phys, pair);

    write_text(out_dir / "dynamic_result.json",
               loopsim::dynamic_result_to_json(phys, pair, up, down, result, margin.margin));
    write_fringe_csv(out_dir / "fringe.csv",
                     {{result.area(), result.p_up, result.p_down, result.visibility}});
    std::cout << "dynamic-run: P_up=" << fmt(result.p_up)
              << " visibility=" << fmt(result.visibility) << " margin=" << fmt(margin.margin)
              << "\n";
}

void run_oracle_check(const ordered_json& cfg, const fs::path& out_dir, int snapshot_stride) {
    const loopsim::DynamicConfig phys = dynamic_config(cfg);
    const loopsim::PathPair pair = pair_from_config(cfg);
    const ordered_json numerics = cfg.contains("numerics") ? cfg.at("numerics") : ordered_json{};
    const double tol = number_or(numerics, "solver_tol", 1e-10);

    loopsim::Grid grid = loopsim::make_default_grid(phys, pair, tol);
    if (numerics.is_object() && numerics.contains("grid")) {
        const auto& g = numerics.at("grid");
        grid = loopsim::Grid(number_or(g, "x_min", grid.x_min), number_or(g, "x_max", grid.x_max),
                             static_cast<int>(number_or(g, "n_points", grid.n_points)),
                             number_or(g, "dt", grid.dt));
    }
    if (cfg.contains("numerics") && numerics.contains("snapshot_stride"))
        snapshot_stride = static_cast<int>(number_or(numerics, "snapshot_stride", 0));

    if (snapshot_stride > 0) {
        for (const char* branch : {"up", "down"}) {
            std::ostringstream csv;
            csv << "t,x,re,im\n";
            long step = 0;
            auto sink = [&](double t, const std::vector<double>& xs,
                            const std::vector<std::complex<double>>& psi) {
                if (step++ % snapshot_stride != 0) return;
                for (std::size_t j = 0; j < xs.size(); ++j)
                    csv << fmt(t) << ',' << fmt(xs[j]) << ',' << fmt(psi[j].real()) << ','
                        << fmt(psi[j].imag()) << '\n';
            };
            const loopsim::TrajectorySpec& traj =
                std::string(branch) == "up" ? pair.up() : pair.down();
            loopsim::evolve_branch(phys, traj, grid, loopsim::EvolutionMode::CompletedSquare, sink);
            write_text(out_dir / (std::string("snapshots_") + branch + ".csv"), csv.str());
        }
    }

    const loopsim::OracleComparison cmp = loopsim::compare_oracle(phys, pair, grid, tol);
    ordered_json doc;
    doc["fidelity_up"] = cmp.fidelity_up;
    doc["fidelity_down"] = cmp.fidelity_down;
    doc["phase_error_up"] = cmp.phase_error_up;
    doc["phase_error_down"] = cmp.phase_error_down;
    doc["overlap_numeric"] = {cmp.overlap_numeric.real(), cmp.overlap_numeric.imag()};
    doc["overlap_analytic"] = {cmp.overlap_analytic.real(), cmp.overlap_analytic.imag()};
    doc["overlap_abs_error"] = cmp.overlap_abs_error;
    doc["norm_drift_up"] = cmp.norm_drift_up;
    doc["norm_drift_down"] = cmp.norm_drift_down;
    doc["P_up_numeric"] = cmp.p_up_numeric;
    write_text(out_dir / "oracle_result.json", doc.dump(2) + "\n");
    std::cout << "oracle-check: fidelity=" << fmt(std::min(cmp.fidelity_up, cmp.fidelity_down))
              << " overlap_error=" << fmt(cmp.overlap_abs_error) << "\n";
}

void run_wilson_convergence(const ordered_json& cfg, const fs::path& out_dir) {
    const loopsim::StaticConfig phys = static_config(cfg);
    const auto& paths = require(cfg, "paths", "");
    const loopsim::TrajectorySpec traj =
        trajectory_from_doc(require(paths, "up", "paths"), "paths.up");

    std::vector<int> ns = {100, 1000, 10000};
    if (cfg.contains("numerics") && cfg.at("numerics").contains("N")) {
        ns.clear();
        for (const auto& v : cfg.at("numerics").at("N")) ns.push_back(v.get<int>());
        if (ns.empty()) throw ConfigError("numerics.N", "need at least one N");
    }

    const std::complex<double> exact = loopsim::continuum_loop(phys.gamma, phys.x0, traj, 1e-13);
    std::ostringstream csv;
    csv << "N,rule,re,im,abs_error\n";
    for (int N : ns) {
        for (loopsim::SamplingRule rule :
             {loopsim::SamplingRule::Left, loopsim::SamplingRule::Midpoint}) {
            const std::complex<double> w =
                loopsim::loop_expectation(loopsim::discretize(phys.x0, traj, N, rule), phys.gamma);
            csv << N << ',' << (rule == loopsim::SamplingRule::Left ? "left" : "midpoint") << ','
                << fmt(w.real()) << ',' << fmt(w.imag()) << ',' << fmt(std::abs(w - exact)) << '\n';
        }
    }
    write_text(out_dir / "convergence.csv", csv.str());
    std::cout << "wilson-convergence: " << ns.size() << " resolutions, continuum phase="
              << fmt(std::arg(exact)) << "\n";
}

void run_estimate(const ordered_json& cfg, const fs::path& out_dir, std::uint64_t seed) {
    const loopsim::StaticConfig phys = static_config(cfg);
    const ordered_json numerics = cfg.contains("numerics") ? cfg.at("numerics") : ordered_json{};

    std::vector<loopsim::MeasurementRecord> records;
    if (cfg.contains("records_csv")) {
        std::ifstream is(cfg.at("records_csv").get<std::string>());
        if (!is) throw ConfigError("records_csv", "cannot open file");
        records = loopsim::read_records_csv(is);
    } else {
        const auto& sim = require(cfg, "forward", "");
        const double area_min = require_number(sim, "area_min", "forward");
        const double area_max = require_number(sim, "area_max", "forward");
        const int count = static_cast<int>(require_number(sim, "count", "forward"));
        const auto shots = static_cast<std::uint64_t>(require_number(sim, "shots", "forward"));
        if (count < 2) throw ConfigError("forward.count", "need at least two areas");

        std::vector<loopsim::PathPair> pairs;
        const double tau = phys.T / 5.0;
        for (int i = 0; i < count; ++i) {
            const double area = area_min + (area_max - area_min) * (i + 0.5) / count;
            const double D = area / (2.0 * (phys.T - tau));
            pairs.emplace_back(loopsim::TrajectorySpec(loopsim::QuinticBumpHold{D, tau}, phys.T),
                               loopsim::TrajectorySpec(loopsim::QuinticBumpHold{-D, tau}, phys.T));
        }
        records = loopsim::simulate_counts(phys, pairs, shots, seed);
        std::ostringstream csv;
        loopsim::write_records_csv(csv, records);
        write_text(out_dir / "records.csv", csv.str());
    }

    const double lo = number_or(numerics, "gamma_min", 0.05);
    const double hi = number_or(numerics, "gamma_max", 3.0);
    const int grid_points = static_cast<int>(number_or(numerics, "grid_points", 512));
    const double phi0 = number_or(numerics, "phi0", 0.0);
    const loopsim::FitResult fit =
        loopsim::fit_string_tension(records, {lo, hi}, grid_points, phi0);
    write_text(out_dir / "fit.json", loopsim::fit_to_json(fit));
    std::cout << "estimate: gamma_hat=" << fmt(fit.gamma_hat)
              << " stderr=" << fmt(fit.stderr_gamma)
              << (fit.aliasing_warning ? " (aliasing warning)" : "") << "\n";
}

void run_area_law(const ordered_json& cfg, const fs::path& out_dir, std::uint64_t seed) {
    const loopsim::StaticConfig phys = static_config(cfg);
    const auto& params = require(cfg, "area_law", "");
    const double a_target = require_number(params, "A_target", "area_law");
    const int n_paths = static_cast<int>(require_number(params, "n_paths", "area_law"));
    const double tol = number_or(params, "tol", 1e-4);

    const loopsim::AreaLawReport report =
        loopsim::area_law_test(phys, a_target, n_paths, seed, tol);
    write_text(out_dir / "area_law.json", loopsim::area_law_report_to_json(report));
    std::cout << "area-law-test: spread=" << fmt(report.spread)
              << (report.confining ? " confining" : " not confining") << "\n";
}

void run_sweep(const ordered_json& cfg, const fs::path& out_dir, int workers) {
    const loopsim::StaticConfig phys = static_config(cfg);
    const auto& sweep = require(cfg, "sweep", "");
    const double area_min = require_number(sweep, "area_min", "sweep");
    const double area_max = require_number(sweep, "area_max", "sweep");
    const int count = static_cast<int>(require_number(sweep, "count", "sweep"));
    if (count < 1) throw ConfigError("sweep.count", "count must be >= 1");
    if (cfg.contains("workers")) workers = static_cast<int>(number_or(cfg, "workers", workers));
    workers = std::max(1, workers);

    const double tau = phys.T / 5.0;
    std::vector<std::array<double, 4>> rows(static_cast<std::size_t>(count));
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&](int begin, int end) {
        try {
            for (int i = begin; i < end; ++i) {
                const double area =
                    count == 1 ? area_min
                               : area_min + (area_max - area_min) * i / (count - 1.0);
                const double D = area / (2.0 * (phys.T - tau));
                loopsim::PathPair pair(
                    loopsim::TrajectorySpec(loopsim::QuinticBumpHold{D, tau}, phys.T),
                    loopsim::TrajectorySpec(loopsim::QuinticBumpHold{-D, tau}, phys.T));
                const loopsim::StaticRunResult r = loopsim::static_run(phys, pair);
                rows[static_cast<std::size_t>(i)] = {r.area, r.p_up, r.p_down, 1.0};
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0, count);
    } else {
        std::vector<std::thread> threads;
        const int chunk = (count + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(count, begin + chunk);
            if (begin < end) threads.emplace_back(work, begin, end);
        }
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Results land in input order no matter which worker finished first.
    write_fringe_csv(out_dir / "fringe.csv", rows);
    std::cout << "sweep: " << count << " areas in [" << fmt(area_min) << ", " << fmt(area_max)
              << "]\n";
}

// ---------------------------------------------------------------------------

int cmd_run(const std::string& config_path, std::optional<std::string> output_dir_flag,
            std::optional<std::uint64_t> seed_flag, std::optional<int> workers_flag,
            int snapshot_stride) {
    ordered_json cfg;
    std::string scenario;
    fs::path out_dir;
    std::uint64_t seed = 0;
    int workers = 1;
    try {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("config", "cannot open " + config_path);
        try {
            cfg = ordered_json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config", std::string("invalid json: ") + e.what());
        }
        const int version = static_cast<int>(number_or(cfg, "schema_version", kSchemaVersion));
        if (version != kSchemaVersion)
            throw ConfigError("schema_version", "unsupported schema version");
        scenario = require(cfg, "scenario", "").get<std::string>();

        seed = static_cast<std::uint64_t>(number_or(cfg, "seed", 1));
        if (seed_flag) seed = *seed_flag;
        workers = static_cast<int>(number_or(cfg, "workers", 1));
        if (workers_flag) workers = *workers_flag;

        std::string dir = cfg.contains("output_dir") ? cfg.at("output_dir").get<std::string>() : "out";
        if (const char* env = std::getenv("LOOPSIM_OUTPUT_DIR")) dir = env;
        if (output_dir_flag) dir = *output_dir_flag;
        out_dir = dir;
        fs::create_directories(out_dir);
    } catch (const ConfigError& e) {
        fail(kExitConfig, "schema", e.what(), e.field);
    } catch (const std::exception& e) {
        fail(kExitConfig, "schema", e.what());
    }

    try {
        if (scenario == "static-run") run_static(cfg, out_dir);
        else if (scenario == "dynamic-run") run_dynamic(cfg, out_dir);
        else if (scenario == "oracle-check") run_oracle_check(cfg, out_dir, snapshot_stride);
        else if (scenario == "wilson-convergence") run_wilson_convergence(cfg, out_dir);
        else if (scenario == "estimate") run_estimate(cfg, out_dir, seed);
        else if (scenario == "area-law-test") run_area_law(cfg, out_dir, seed);
        else if (scenario == "sweep") run_sweep(cfg, out_dir, workers);
        else fail(kExitConfig, "schema", "unknown scenario '" + scenario + "'", "scenario");
    } catch (const ConfigError& e) {
        fail(kExitConfig, "schema", e.what(), e.field);
    } catch (const loopsim::DomainError& e) {
        fail(kExitDomain, "domain", e.what());
    } catch (const loopsim::ValidationError& e) {
        fail(kExitDomain, "validation", e.what());
    } catch (const loopsim::NumericsError& e) {
        fail(kExitNumerics, "numerics", e.what());
    } catch (const loopsim::ContractError& e) {
        fail(kExitNumerics, "contract", e.what());
    } catch (const std::exception& e) {
        fail(kExitNumerics, "internal", e.what());
    }
    return 0;
}

int cmd_describe(const std::string& scenario) {
    static const std::map<std::string, std::string> schemas = {
        {"static-run", R"({
  "schema_version": 1,
  "scenario": "static-run",
  "output_dir": "out",
  "physics": {"gamma": 0.5, "x0": 10.0, "T": 10.0, "beta": 1.0},
  "paths": {
    "up":   {"family": "quintic_bump_hold", "params": {"D": 1.0, "tau_r": 2.0}, "T": 10.0},
    "down": {"family": "quintic_bump_hold", "params": {"D": -1.0, "tau_r": 2.0}, "T": 10.0}
  }
}
Outputs: static_result.json {gamma, beta, x0, T, area, phase_unwrapped, phase_wrapped, P_up, P_down},
         fringe.csv (area,P_up,P_down,visibility). beta defaults to 1.)"},
        {"dynamic-run", R"({
  "schema_version": 1,
  "scenario": "dynamic-run",
  "output_dir": "out",
  "physics": {"m": 1.0, "omega": 5.0, "gamma": 0.1, "x0": 10.0, "T": 20.0},
  "paths": {
    "up":   {"family": "quintic_bump_hold", "params": {"D": 1.0, "tau_r": 5.0}, "T": 20.0},
    "down": {"family": "quintic_bump_hold", "params": {"D": -1.0, "tau_r": 5.0}, "T": 20.0}
  },
  "numerics": {"solver_tol": 1e-10}
}
Outputs: dynamic_result.json {cfg, pair, q_up, qdot_up, q_down, qdot_down, alpha_up, alpha_down,
         delta_phi, B, P_up, P_down, margin}, fringe.csv.)"},
        {"oracle-check", R"({
  "schema_version": 1,
  "scenario": "oracle-check",
  "output_dir": "out",
  "physics": {"m": 1.0, "omega": 5.0, "gamma": 0.1, "x0": 10.0, "T": 20.0},
  "paths": { "up": {...}, "down": {...} },
  "numerics": {
    "solver_tol": 1e-10,
    "snapshot_stride": 0,
    "grid": {"x_min": null, "x_max": null, "n_points": 2048, "dt": null}
  }
}
Grid defaults come from the branch solutions (box = equilibrium center +- (max|d| + max|q| +
10 ground-state widths), n_points = 2048, dt = 5e-4/omega). snapshot_stride > 0 dumps
snapshots_up.csv / snapshots_down.csv with columns t,x,re,im.
Outputs: oracle_result.json {fidelity_up, fidelity_down, phase_error_up, phase_error_down,
         overlap_numeric, overlap_analytic, overlap_abs_error, norm_drift_up, norm_drift_down,
         P_up_numeric}.)"},
        {"wilson-convergence", R"({
  "schema_version": 1,
  "scenario": "wilson-convergence",
  "output_dir": "out",
  "physics": {"gamma": 0.5, "x0": 10.0, "T": 10.0},
  "paths": { "up": {"family": "quintic_bump_hold", "params": {"D": 1.0, "tau_r": 2.3}, "T": 10.0} },
  "numerics": {"N": [100, 1000, 10000]}
}
Outputs: convergence.csv (N,rule,re,im,abs_error) for the left and midpoint rules.)"},
        {"estimate", R"({
  "schema_version": 1,
  "scenario": "estimate",
  "output_dir": "out",
  "seed": 1,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0},
  "forward": {"area_min": 0.0, "area_max": 8.0, "count": 50, "shots": 10000},
  "numerics": {"gamma_min": 0.05, "gamma_max": 3.0, "grid_points": 512, "phi0": 0.0}
}
Either "forward" (simulate records) or "records_csv" (path to an area,shots,ups file).
Outputs: records.csv (when simulated), fit.json {gamma_hat, stderr, log_likelihood,
         aliasing_warning, n_records}.)"},
        {"area-law-test", R"({
  "schema_version": 1,
  "scenario": "area-law-test",
  "output_dir": "out",
  "seed": 1,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0, "beta": 1.0},
  "area_law": {"A_target": 16.0, "n_paths": 5, "tol": 1e-4}
}
Outputs: area_law.json {spread, confining, degenerate_warning, phases}.)"},
        {"sweep", R"({
  "schema_version": 1,
  "scenario": "sweep",
  "output_dir": "out",
  "workers": 1,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0},
  "sweep": {"area_min": 0.0, "area_max": 8.0, "count": 50}
}
Outputs: fringe.csv with one row per area (area,P_up,P_down,visibility),
written in input order regardless of worker scheduling.)"},
    };
    const auto it = schemas.find(scenario);
    if (it == schemas.end())
        fail(kExitConfig, "schema", "unknown scenario '" + scenario + "'", "scenario");
    std::cout << it->second << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loopsim: superposed-loop interferometry simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    int snapshot_stride = 0;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Path to the config file")->required();
    run->add_option("--output-dir", output_dir, "Override the output directory");
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--workers", workers, "Override the sweep worker count");
    run->add_option("--snapshot-stride", snapshot_stride,
                    "Dump every n-th oracle snapshot (oracle-check only)");

    std::string scenario;
    auto* describe = app.add_subcommand("describe", "Print the config schema for a scenario");
    describe->add_option("scenario", scenario, "Scenario name")->required();

    std::string selftest_dir = "selftest_out";
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest->add_option("--output-dir", selftest_dir, "Directory for selftest artifacts");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, output_dir, seed, workers, snapshot_stride);
    if (describe->parsed()) return cmd_describe(scenario);
    if (selftest->parsed()) {
        if (const char* env = std::getenv("LOOPSIM_OUTPUT_DIR")) selftest_dir = env;
        const loopsim::selftest::Report report =
            loopsim::selftest::run_with_determinism(selftest_dir);
        std::cout << (report.all_pass ? "selftest: all criteria passed"
                                      : "selftest: some criteria FAILED")
                  << "\n";
        return report.all_pass ? 0 : 1;
    }
    return 0;
}
