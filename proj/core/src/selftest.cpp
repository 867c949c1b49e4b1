#include "loopsim/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "loopsim/dynamic_solver.hpp"
#include "loopsim/errors.hpp"
#include "loopsim/estimation.hpp"
#include "loopsim/json_io.hpp"
#include "loopsim/rng.hpp"
#include "loopsim/schrodinger_oracle.hpp"
#include "loopsim/static_interferometer.hpp"
#include "loopsim/trajectory.hpp"
#include "loopsim/wilson_loop.hpp"

namespace loopsim::selftest {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("selftest: cannot write " + path.string());
    os << content;
}

// Deterministic mixed-family pair generator for the random batteries.
PathPair random_pair(std::uint64_t seed, std::uint64_t stream, double x0, double T) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        const CounterRng rng(seed, stream * 97 + attempt);
        const int kind_up = static_cast<int>(rng.bits(0) % 2);
        const int kind_down = static_cast<int>(rng.bits(1) % 2);
        const double tau_up = T * rng.uniform(2, 0.08, 0.45);
        const double tau_down = T * rng.uniform(3, 0.08, 0.45);
        const double D_up = rng.uniform(4, 0.0, 2.0);
        const double D_down = -rng.uniform(5, 0.0, std::min(2.0, 0.8 * x0));
        TrajectorySpec up = kind_up == 0 ? TrajectorySpec(QuinticBumpHold{D_up, tau_up}, T)
                                         : TrajectorySpec(SineFourthBump{D_up}, T);
        TrajectorySpec down = kind_down == 0 ? TrajectorySpec(QuinticBumpHold{D_down, tau_down}, T)
                                             : TrajectorySpec(SineFourthBump{D_down}, T);
        PathPair pair(std::move(up), std::move(down));
        if (validate(pair, x0).valid()) return pair;
        if (attempt > 8) throw Error("selftest: could not build a valid random pair");
    }
}

// The dynamic scenario exercised by the oracle gate.
DynamicConfig standard_config() { return {1.0, 5.0, 0.1, 10.0, 20.0}; }

PathPair standard_pair() {
    return PathPair(TrajectorySpec(QuinticBumpHold{1.0, 5.0}, 20.0),
                    TrajectorySpec(QuinticBumpHold{-1.0, 5.0}, 20.0));
}

double slope_order(const std::vector<double>& ns, const std::vector<double>& errs) {
    // Least-squares slope of log10(err) against log10(N); the order is its
    // negation.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double x = std::log10(ns[i]);
        const double y = std::log10(std::max(errs[i], 1e-16));  // double-precision floor
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct CriterionOutcome {
    bool pass = false;
    std::string details;
};

CriterionOutcome criterion_static_fringe(const fs::path& dir) {
    const double x0 = 10.0, T = 10.0;
    const std::vector<double> gammas = {0.1, 0.7, 2.0};
    double worst = 0.0;

    std::ostringstream csv;
    csv << "area,P_up,P_down,visibility\n";
    for (int i = 0; i < 200; ++i) {
        const PathPair pair = random_pair(20240001, static_cast<std::uint64_t>(i), x0, T);
        const double area = enclosed_area(pair, 1e-12);
        for (double gamma : gammas) {
            const StaticConfig cfg{gamma, x0, T, 1.0};
            const RamseyProbabilities p = ramsey(evolve_static(cfg, pair, 1e-12));
            const double s = std::sin(0.5 * gamma * area);
            worst = std::max(worst, std::abs(p.p_up - s * s));
            if (gamma == 0.7)
                csv << fmt(area) << ',' << fmt(p.p_up) << ',' << fmt(p.p_down) << ",1\n";
        }
    }
    write_file(dir / "c1_fringe.csv", csv.str());

    CriterionOutcome out;
    out.pass = worst <= 1e-10;
    out.details = "max |P_up - sin^2(gamma A / 2)| = " + fmt3(worst) + " (limit 1e-10)";
    return out;
}

CriterionOutcome criterion_greens_vs_ode(const fs::path& dir) {
    double worst_q = 0.0, worst_qdot = 0.0, worst_phase = 0.0;
    std::ostringstream csv;
    csv << "scenario,dq,dqdot,dphase\n";
    for (int i = 0; i < 50; ++i) {
        const CounterRng rng(20240002, static_cast<std::uint64_t>(i));
        DynamicConfig cfg;
        cfg.m = rng.uniform(0, 0.5, 2.0);
        cfg.omega = rng.uniform(1, 0.8, 6.0);
        cfg.gamma = rng.uniform(2, 0.0, 0.5);
        cfg.x0 = 10.0;
        cfg.T = rng.uniform(3, 5.0, 20.0);

        const double tau = cfg.T * rng.uniform(4, 0.1, 0.4);
        const double D = rng.uniform(5, 0.2, 1.5);
        const TrajectorySpec traj = (rng.bits(6) % 2) == 0
                                        ? TrajectorySpec(QuinticBumpHold{D, tau}, cfg.T)
                                        : TrajectorySpec(SineFourthBump{D}, cfg.T);

        const BranchState a = solve_branch(cfg, traj, 1e-10);
        const BranchState b = solve_branch_ode(cfg, traj, 0.001 / cfg.omega);
        const double dq = std::abs(a.q - b.q);
        const double dqdot = std::abs(a.q_dot - b.q_dot);
        const double dphase = std::max({std::abs(a.phi0_tilde - b.phi0_tilde),
                                        std::abs(a.phi0 - b.phi0),
                                        std::abs(a.gamma_phase - b.gamma_phase)});
        worst_q = std::max(worst_q, dq);
        worst_qdot = std::max(worst_qdot, dqdot);
        worst_phase = std::max(worst_phase, dphase);
        csv << i << ',' << fmt(dq) << ',' << fmt(dqdot) << ',' << fmt(dphase) << '\n';
    }
    write_file(dir / "c2_greens_vs_ode.csv", csv.str());

    CriterionOutcome out;
    out.pass = worst_q <= 1e-8 && worst_qdot <= 1e-8 && worst_phase <= 1e-8;
    out.details = "max dq = " + fmt3(worst_q) + ", max dqdot = " + fmt3(worst_qdot) +
                  ", max dphase = " + fmt3(worst_phase) + " (limits 1e-8)";
    return out;
}

CriterionOutcome criterion_oracle_gate(const fs::path& dir) {
    const DynamicConfig cfg = standard_config();
    const PathPair pair = standard_pair();
    const Grid grid = make_default_grid(cfg, pair);
    const OracleComparison cmp = compare_oracle(cfg, pair, grid);

    std::ostringstream json;
    json << "{\n"
         << "  \"fidelity_up\": " << fmt(cmp.fidelity_up) << ",\n"
         << "  \"fidelity_down\": " << fmt(cmp.fidelity_down) << ",\n"
         << "  \"phase_error_up\": " << fmt(cmp.phase_error_up) << ",\n"
         << "  \"phase_error_down\": " << fmt(cmp.phase_error_down) << ",\n"
         << "  \"overlap_abs_error\": " << fmt(cmp.overlap_abs_error) << ",\n"
         << "  \"norm_drift_up\": " << fmt(cmp.norm_drift_up) << ",\n"
         << "  \"norm_drift_down\": " << fmt(cmp.norm_drift_down) << "\n"
         << "}\n";
    write_file(dir / "c3_oracle.json", json.str());

    const double fid = std::min(cmp.fidelity_up, cmp.fidelity_down);
    const double perr = std::max(cmp.phase_error_up, cmp.phase_error_down);
    CriterionOutcome out;
    out.pass = fid >= 1.0 - 1e-6 && perr <= 1e-6 && cmp.overlap_abs_error <= 1e-6;
    out.details = "fidelity = " + fmt3(fid) + ", phase error = " + fmt3(perr) +
                  ", |O - e^{i dPhi} B| = " + fmt3(cmp.overlap_abs_error);
    return out;
}

CriterionOutcome criterion_visibility(const fs::path& dir) {
    // Algebraic law on the random battery.
    double worst_law = 0.0;
    for (int i = 0; i < 50; ++i) {
        const CounterRng rng(20240002, static_cast<std::uint64_t>(i));
        DynamicConfig cfg;
        cfg.m = rng.uniform(0, 0.5, 2.0);
        cfg.omega = rng.uniform(1, 0.8, 6.0);
        cfg.gamma = rng.uniform(2, 0.0, 0.5);
        cfg.x0 = 10.0;
        cfg.T = rng.uniform(3, 5.0, 20.0);
        const PathPair pair = random_pair(20240004, static_cast<std::uint64_t>(i), cfg.x0, cfg.T);
        const BranchState up = solve_branch(cfg, pair.up(), 1e-10);
        const BranchState down = solve_branch(cfg, pair.down(), 1e-10);
        const InterferenceResult r = interference(up, down);
        const double predicted = std::exp(-0.5 * std::norm(up.alpha - down.alpha));
        worst_law = std::max(worst_law, std::abs(r.B0 - predicted));
    }

    // Slow opening: essentially perfect visibility.
    DynamicConfig slow_cfg{1.0, 5.0, 0.1, 10.0, 20.0};
    const PathPair slow_pair(TrajectorySpec(QuinticBumpHold{0.01, 9.0}, 20.0),
                             TrajectorySpec(QuinticBumpHold{-0.01, 9.0}, 20.0));
    const AdiabaticityMargin slow_margin = adiabaticity_margin(slow_cfg, slow_pair);
    const InterferenceResult slow = interference(solve_branch(slow_cfg, slow_pair.up(), 1e-11),
                                                 solve_branch(slow_cfg, slow_pair.down(), 1e-11));

    // Violent opening: visibility measurably lost.
    DynamicConfig fast_cfg{1.0, 5.0, 0.1, 10.0, 20.0};
    const PathPair fast_pair(TrajectorySpec(QuinticBumpHold{1.0, 0.5}, 20.0),
                             TrajectorySpec(QuinticBumpHold{-1.0, 0.5}, 20.0));
    const AdiabaticityMargin fast_margin = adiabaticity_margin(fast_cfg, fast_pair);
    const InterferenceResult fast = interference(solve_branch(fast_cfg, fast_pair.up(), 1e-11),
                                                 solve_branch(fast_cfg, fast_pair.down(), 1e-11));

    std::ostringstream json;
    json << "{\n"
         << "  \"max_visibility_law_error\": " << fmt(worst_law) << ",\n"
         << "  \"slow_margin\": " << fmt(slow_margin.margin) << ",\n"
         << "  \"slow_visibility\": " << fmt(slow.visibility) << ",\n"
         << "  \"fast_margin\": " << fmt(fast_margin.margin) << ",\n"
         << "  \"fast_visibility\": " << fmt(fast.visibility) << "\n"
         << "}\n";
    write_file(dir / "c4_visibility.json", json.str());

    CriterionOutcome out;
    out.pass = worst_law <= 1e-12 && slow_margin.margin < 0.01 && slow.visibility >= 0.9999 &&
               fast_margin.margin > 1.0 && fast.visibility < 0.99;
    out.details = "law error = " + fmt3(worst_law) + "; margin " + fmt3(slow_margin.margin) +
                  " -> |B| = " + fmt3(slow.visibility) + "; margin " + fmt3(fast_margin.margin) +
                  " -> |B| = " + fmt3(fast.visibility);
    return out;
}

CriterionOutcome criterion_area_law(const fs::path& dir) {
    const PathPair pair = standard_pair();
    const DynamicConfig cfg1{1.0, 5.0, 0.1, 10.0, 20.0};
    const DynamicConfig cfg2{1.0, 5.0, 0.2, 10.0, 20.0};
    const InterferenceResult r1 = interference(solve_branch(cfg1, pair.up(), 1e-10),
                                               solve_branch(cfg1, pair.down(), 1e-10));
    const InterferenceResult r2 = interference(solve_branch(cfg2, pair.up(), 1e-10),
                                               solve_branch(cfg2, pair.down(), 1e-10));
    const double area = enclosed_area(pair, 1e-12);
    const double lin_err =
        std::abs(gamma_phase_difference(r2, r1, pair) - (-(0.2 - 0.1) * area));

    StaticConfig confining{0.7, 10.0, 10.0, 1.0};
    const AreaLawReport conf = area_law_test(confining, 16.0, 5, 20240005, 1e-4);
    StaticConfig quadratic{0.7, 10.0, 10.0, 2.0};
    const AreaLawReport nonconf = area_law_test(quadratic, 16.0, 5, 20240005, 1e-4);

    write_file(dir / "c5_area_law_beta1.json", area_law_report_to_json(conf));
    write_file(dir / "c5_area_law_beta2.json", area_law_report_to_json(nonconf));

    CriterionOutcome out;
    out.pass = lin_err <= 1e-9 && conf.spread <= 1e-8 && conf.confining &&
               nonconf.spread >= 1e-2 && !nonconf.confining;
    out.details = "linearity error = " + fmt3(lin_err) + "; beta=1 spread = " + fmt3(conf.spread) +
                  "; beta=2 spread = " + fmt3(nonconf.spread);
    return out;
}

CriterionOutcome criterion_wilson(const fs::path& dir) {
    double worst_dev = 0.0;
    for (int i = 0; i < 20; ++i) {
        const CounterRng rng(20240006, static_cast<std::uint64_t>(i));
        const double x0 = 10.0, T = 10.0;
        const StaticConfig cfg{rng.uniform(0, 0.05, 2.0), x0, T, 1.0};
        const PathPair pair = random_pair(20240007, static_cast<std::uint64_t>(i), x0, T);
        const CorrespondenceReport rep = amplitude_correspondence(cfg, pair, 1e-12);
        worst_dev = std::max({worst_dev, rep.up.deviation, rep.down.deviation});
    }

    // Convergence measurement: staircase loop value against the continuum.
    // Irrational ramp time so the sampling never aligns with the ramp kinks.
    const double gamma = 0.5, x0 = 10.0, T = 10.0;
    const TrajectorySpec traj(QuinticBumpHold{1.0, std::sqrt(5.0)}, T);
    const std::complex<double> exact = continuum_loop(gamma, x0, traj, 1e-13);
    std::vector<double> ns = {100.0, 1000.0, 10000.0};
    std::vector<double> err_left, err_mid;
    std::ostringstream csv;
    csv << "N,rule,re,im,abs_error\n";
    for (double nd : ns) {
        const int N = static_cast<int>(nd);
        for (SamplingRule rule : {SamplingRule::Left, SamplingRule::Midpoint}) {
            const std::complex<double> w = loop_expectation(discretize(x0, traj, N, rule), gamma);
            const double err = std::abs(w - exact);
            (rule == SamplingRule::Left ? err_left : err_mid).push_back(err);
            csv << N << ',' << (rule == SamplingRule::Left ? "left" : "midpoint") << ','
                << fmt(w.real()) << ',' << fmt(w.imag()) << ',' << fmt(err) << '\n';
        }
    }
    write_file(dir / "c6_convergence.csv", csv.str());

    const double order_left = slope_order(ns, err_left);
    const double order_mid = slope_order(ns, err_mid);

    CriterionOutcome out;
    out.pass = worst_dev <= 1e-9 && std::abs(order_left - 1.0) <= 0.2 &&
               std::abs(order_mid - 2.0) <= 0.2;
    out.details = "max correspondence deviation = " + fmt3(worst_dev) +
                  "; measured orders: left = " + fmt3(order_left) +
                  " (required 1 +- 0.2), midpoint = " + fmt3(order_mid) + " (required 2 +- 0.2)";
    return out;
}

CriterionOutcome criterion_estimation(const fs::path& dir) {
    const double gamma_true = 0.7, x0 = 10.0, T = 10.0;
    const StaticConfig cfg{gamma_true, x0, T, 1.0};

    std::vector<PathPair> pairs;
    std::vector<double> areas;
    const double tau = T / 5.0;
    for (int i = 0; i < 50; ++i) {
        const double area = (i + 0.5) * 8.0 / 50.0;
        const double D = area / (2.0 * (T - tau));
        pairs.emplace_back(TrajectorySpec(QuinticBumpHold{D, tau}, T),
                           TrajectorySpec(QuinticBumpHold{-D, tau}, T));
        areas.push_back(area);
    }

    int covered = 0;
    double worst_abs_err = 0.0;
    for (std::uint64_t rep = 1; rep <= 100; ++rep) {
        const auto records = simulate_counts(cfg, pairs, 10000, rep);
        const FitResult fit = fit_string_tension(records, {0.1, 2.0}, 512);
        if (std::abs(fit.gamma_hat - gamma_true) <= 3.0 * fit.stderr_gamma) ++covered;
        worst_abs_err = std::max(worst_abs_err, std::abs(fit.gamma_hat - gamma_true));
        if (rep == 1) {
            std::ostringstream csv;
            write_records_csv(csv, records);
            write_file(dir / "c7_records_rep1.csv", csv.str());
            write_file(dir / "c7_fit_rep1.json", fit_to_json(fit));
        }
    }

    // Noiseless limit: counts rounded from the exact probabilities.
    std::vector<MeasurementRecord> noiseless;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double p = ramsey(evolve_static(cfg, pairs[i], 1e-12)).p_up;
        MeasurementRecord rec;
        rec.area = areas[i];
        rec.shots = 1000000;
        rec.ups = static_cast<std::uint64_t>(std::llround(1e6 * p));
        noiseless.push_back(rec);
    }
    const FitResult clean = fit_string_tension(noiseless, {0.1, 2.0}, 512);
    const double clean_err = std::abs(clean.gamma_hat - gamma_true);

    std::ostringstream json;
    json << "{\n"
         << "  \"covered\": " << covered << ",\n"
         << "  \"noiseless_error\": " << fmt(clean_err) << "\n"
         << "}\n";
    write_file(dir / "c7_summary.json", json.str());

    CriterionOutcome out;
    out.pass = covered >= 95 && clean_err <= 1e-3;
    out.details = "covered " + std::to_string(covered) + "/100 within 3 stderr (need >= 95); " +
                  "noiseless |gamma_hat - 0.7| = " + fmt3(clean_err) + " (limit 1e-3)";
    return out;
}

CriterionResult run_criterion(int id, const std::string& name, double runtime_limit_s,
                              const fs::path& dir,
                              const std::function<CriterionOutcome(const fs::path&)>& body,
                              bool verbose) {
    CriterionResult result;
    result.id = id;
    result.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const CriterionOutcome outcome = body(dir);
        result.pass = outcome.pass;
        result.details = outcome.details;
    } catch (const std::exception& e) {
        result.pass = false;
        result.details = std::string("exception: ") + e.what();
    }
    result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (runtime_limit_s > 0.0 && result.elapsed_s > runtime_limit_s) {
        result.pass = false;
        result.details += "; runtime " + fmt3(result.elapsed_s) + " s exceeds " +
                          fmt3(runtime_limit_s) + " s";
    }
    if (verbose) {
        std::printf("[%d/8] %-24s %s (%.2f s) %s\n", id, name.c_str(),
                    result.pass ? "PASS" : "FAIL", result.elapsed_s, result.details.c_str());
        std::fflush(stdout);
    }
    return result;
}

}  // namespace

Report run_all(const std::string& output_dir, bool verbose) {
    const fs::path dir(output_dir);
    fs::create_directories(dir);

    Report report;
    report.criteria.push_back(
        run_criterion(1, "static fringe law", 5.0, dir, criterion_static_fringe, verbose));
    report.criteria.push_back(
        run_criterion(2, "greens vs ode oracle", 10.0, dir, criterion_greens_vs_ode, verbose));
    report.criteria.push_back(
        run_criterion(3, "schrodinger oracle gate", 60.0, dir, criterion_oracle_gate, verbose));
    report.criteria.push_back(
        run_criterion(4, "visibility law", 0.0, dir, criterion_visibility, verbose));
    report.criteria.push_back(
        run_criterion(5, "gamma linearity / area law", 0.0, dir, criterion_area_law, verbose));
    report.criteria.push_back(
        run_criterion(6, "wilson correspondence", 0.0, dir, criterion_wilson, verbose));
    report.criteria.push_back(
        run_criterion(7, "estimation", 30.0, dir, criterion_estimation, verbose));

    report.all_pass = std::all_of(report.criteria.begin(), report.criteria.end(),
                                  [](const CriterionResult& c) { return c.pass; });

    // Deterministic result file: measured values only, no timings.
    std::ostringstream json;
    json << "{\n  \"criteria\": [\n";
    for (std::size_t i = 0; i < report.criteria.size(); ++i) {
        const auto& c = report.criteria[i];
        json << "    {\"id\": " << c.id << ", \"name\": \"" << c.name << "\", \"pass\": "
             << (c.pass ? "true" : "false") << ", \"details\": \"" << c.details << "\"}"
             << (i + 1 < report.criteria.size() ? ",\n" : "\n");
    }
    json << "  ],\n  \"all_pass\": " << (report.all_pass ? "true" : "false") << "\n}\n";
    write_file(dir / "acceptance_results.json", json.str());
    return report;
}

bool compare_output_dirs(const std::string& dir_a, const std::string& dir_b, std::string* detail) {
    auto list = [](const fs::path& root) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(root))
            if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), root));
        std::sort(files.begin(), files.end());
        return files;
    };
    const auto a = list(dir_a), b = list(dir_b);
    if (a != b) {
        if (detail) *detail = "file lists differ";
        return false;
    }
    for (const auto& rel : a) {
        std::ifstream fa(fs::path(dir_a) / rel, std::ios::binary);
        std::ifstream fb(fs::path(dir_b) / rel, std::ios::binary);
        std::ostringstream ca, cb;
        ca << fa.rdbuf();
        cb << fb.rdbuf();
        if (ca.str() != cb.str()) {
            if (detail) *detail = "content differs: " + rel.string();
            return false;
        }
    }
    return true;
}

Report run_with_determinism(const std::string& output_dir, bool verbose) {
    const fs::path dir(output_dir);
    fs::create_directories(dir);

    Report report = run_all((dir / "run_a").string(), verbose);
    Report second = run_all((dir / "run_b").string(), false);
    (void)second;

    CriterionResult det;
    det.id = 8;
    det.name = "determinism";
    const auto t0 = std::chrono::steady_clock::now();
    std::string diff;
    det.pass = compare_output_dirs((dir / "run_a").string(), (dir / "run_b").string(), &diff);
    det.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    det.details = det.pass ? "two runs byte-identical" : diff;
    if (verbose)
        std::printf("[8/8] %-24s %s (%.2f s) %s\n", det.name.c_str(),
                    det.pass ? "PASS" : "FAIL", det.elapsed_s, det.details.c_str());
    report.criteria.push_back(det);
    report.all_pass = report.all_pass && det.pass;
    return report;
}

}  // namespace loopsim::selftest
