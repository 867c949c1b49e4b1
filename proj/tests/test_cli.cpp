#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const char* kCli = LOOPSIM_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args, const fs::path& dir,
                  const std::string& extra_env = "") {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = extra_env + std::string(kCli) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_config(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

const std::string kZeroPathStatic = R"({
  "schema_version": 1,
  "scenario": "static-run",
  "output_dir": "OUTDIR",
  "physics": {"gamma": 0.5, "x0": 10.0, "T": 10.0},
  "paths": {
    "up":   {"family": "quintic_bump_hold", "params": {"D": 0.0, "tau_r": 2.0}, "T": 10.0},
    "down": {"family": "quintic_bump_hold", "params": {"D": 0.0, "tau_r": 2.0}, "T": 10.0}
  }
})";

std::string with_outdir(std::string text, const fs::path& dir) {
    const std::string key = "OUTDIR";
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    std::string path = dir.string();
    return text.replace(pos, key.size(), path);
}

}  // namespace

TEST_CASE("describe prints schemas and rejects unknown scenarios") {
    const fs::path dir = scratch_dir("describe");
    const RunResult known = run_cli("describe static-run", dir);
    CHECK(known.exit_code == 0);
    CHECK(known.out.find("physics") != std::string::npos);

    const RunResult oracle = run_cli("describe oracle-check", dir);
    CHECK(oracle.exit_code == 0);
    CHECK(oracle.out.find("grid") != std::string::npos);
    CHECK(oracle.out.find("dt") != std::string::npos);

    const RunResult bogus = run_cli("describe bogus", dir);
    CHECK(bogus.exit_code == 2);
}

TEST_CASE("static run with zero paths emits a single certain row") {
    const fs::path dir = scratch_dir("static_zero");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, with_outdir(kZeroPathStatic, dir / "out"));
    const RunResult r = run_cli("run " + cfg.string(), dir);
    REQUIRE(r.exit_code == 0);

    const auto lines = csv_lines(slurp(dir / "out" / "fringe.csv"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "area,P_up,P_down,visibility");
    std::istringstream row(lines[1]);
    std::string field;
    std::getline(row, field, ',');
    CHECK(std::stod(field) == 0.0);  // area
    std::getline(row, field, ',');
    CHECK(std::stod(field) == 0.0);  // P_up
    std::getline(row, field, ',');
    CHECK(std::stod(field) == doctest::Approx(1.0).epsilon(1e-12));  // P_down

    const std::string result = slurp(dir / "out" / "static_result.json");
    CHECK(result.find("\"P_down\"") != std::string::npos);
}

TEST_CASE("malformed config exits 2 with the offending field named") {
    const fs::path dir = scratch_dir("bad_config");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "static-run",
  "physics": {"x0": 10.0, "T": 10.0},
  "paths": {
    "up":   {"family": "quintic_bump_hold", "params": {"D": 0.0, "tau_r": 2.0}, "T": 10.0},
    "down": {"family": "quintic_bump_hold", "params": {"D": 0.0, "tau_r": 2.0}, "T": 10.0}
  }
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("physics.gamma") != std::string::npos);
    CHECK(r.out.find("\"error\"") != std::string::npos);

    const RunResult unparseable = run_cli("run /nonexistent.json", dir);
    CHECK(unparseable.exit_code == 2);
}

TEST_CASE("physics-domain violations exit 4") {
    const fs::path dir = scratch_dir("domain");
    const fs::path cfg = dir / "config.json";
    // The down branch dives through the static charge at x = 0.
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "static-run",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "physics": {"gamma": 0.5, "x0": 1.0, "T": 10.0},
  "paths": {
    "up":   {"family": "quintic_bump_hold", "params": {"D": 1.0, "tau_r": 2.0}, "T": 10.0},
    "down": {"family": "quintic_bump_hold", "params": {"D": -2.0, "tau_r": 2.0}, "T": 10.0}
  }
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    CHECK(r.exit_code == 4);
    CHECK(r.out.find("\"error\"") != std::string::npos);
}

TEST_CASE("numerical failures exit 3") {
    const fs::path dir = scratch_dir("numerics");
    const fs::path cfg = dir / "config.json";
    // Every simulated area is zero: the likelihood cannot identify gamma.
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "estimate",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "seed": 1,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0},
  "forward": {"area_min": 0.0, "area_max": 0.0, "count": 5, "shots": 100}
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    CHECK(r.exit_code == 3);
}

TEST_CASE("sweep matches the fringe law and is deterministic across workers") {
    const fs::path dir = scratch_dir("sweep");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "sweep",
  "output_dir": ")" + (dir / "out1").string() + R"(",
  "workers": 3,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0},
  "sweep": {"area_min": 0.0, "area_max": 8.0, "count": 50}
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    REQUIRE(r.exit_code == 0);

    const auto lines = csv_lines(slurp(dir / "out1" / "fringe.csv"));
    REQUIRE(lines.size() == 51);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string field;
        std::getline(row, field, ',');
        const double area = std::stod(field);
        std::getline(row, field, ',');
        const double p_up = std::stod(field);
        const double s = std::sin(0.5 * 0.7 * area);
        CHECK(std::abs(p_up - s * s) <= 1e-12);
    }

    // Same config, single worker, different directory: byte-identical rows.
    const RunResult r2 =
        run_cli("run " + cfg.string() + " --workers 1 --output-dir " + (dir / "out2").string(),
                dir);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir / "out1" / "fringe.csv") == slurp(dir / "out2" / "fringe.csv"));
}

TEST_CASE("environment variable overrides the output directory") {
    const fs::path dir = scratch_dir("env_override");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, with_outdir(kZeroPathStatic, dir / "ignored"));
    const std::string env = "LOOPSIM_OUTPUT_DIR=" + (dir / "env_out").string() + " ";
    const RunResult r = run_cli("run " + cfg.string(), dir, env);
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "env_out" / "fringe.csv"));
    CHECK_FALSE(fs::exists(dir / "ignored" / "fringe.csv"));
}

TEST_CASE("estimate writes records and a fit") {
    const fs::path dir = scratch_dir("estimate");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "estimate",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "seed": 3,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0},
  "forward": {"area_min": 0.0, "area_max": 8.0, "count": 30, "shots": 5000},
  "numerics": {"gamma_min": 0.1, "gamma_max": 2.0}
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "records.csv"));
    const std::string fit = slurp(dir / "out" / "fit.json");
    CHECK(fit.find("gamma_hat") != std::string::npos);

    const auto pos = fit.find("\"gamma_hat\": ");
    const double gamma_hat = std::stod(fit.substr(pos + 13));
    CHECK(std::abs(gamma_hat - 0.7) <= 0.05);
}

TEST_CASE("area-law scenario reports the classifier verdict") {
    const fs::path dir = scratch_dir("area_law");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "area-law-test",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "seed": 5,
  "physics": {"gamma": 0.7, "x0": 10.0, "T": 10.0, "beta": 1.0},
  "area_law": {"A_target": 16.0, "n_paths": 5, "tol": 1e-4}
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    REQUIRE(r.exit_code == 0);
    const std::string report = slurp(dir / "out" / "area_law.json");
    CHECK(report.find("\"confining\": true") != std::string::npos);
}

TEST_CASE("dynamic run emits the full record") {
    const fs::path dir = scratch_dir("dynamic");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "dynamic-run",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "physics": {"m": 1.0, "omega": 5.0, "gamma": 0.1, "x0": 10.0, "T": 6.0},
  "paths": {
    "up":   {"family": "quintic_bump_hold", "params": {"D": 0.5, "tau_r": 1.5}, "T": 6.0},
    "down": {"family": "quintic_bump_hold", "params": {"D": -0.5, "tau_r": 1.5}, "T": 6.0}
  }
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    REQUIRE(r.exit_code == 0);
    const std::string result = slurp(dir / "out" / "dynamic_result.json");
    for (const char* key : {"q_up", "qdot_up", "alpha_up", "alpha_down", "delta_phi", "B",
                            "P_up", "P_down", "margin"})
        CHECK(result.find(key) != std::string::npos);

    // Re-running the same config reproduces the result byte for byte.
    const RunResult r2 =
        run_cli("run " + cfg.string() + " --output-dir " + (dir / "out2").string(), dir);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir / "out" / "dynamic_result.json") ==
          slurp(dir / "out2" / "dynamic_result.json"));
}

TEST_CASE("wilson convergence table") {
    const fs::path dir = scratch_dir("wilson");
    const fs::path cfg = dir / "config.json";
    write_config(cfg, R"({
  "schema_version": 1,
  "scenario": "wilson-convergence",
  "output_dir": ")" + (dir / "out").string() + R"(",
  "physics": {"gamma": 0.5, "x0": 10.0, "T": 10.0},
  "paths": { "up": {"family": "quintic_bump_hold", "params": {"D": 1.0, "tau_r": 2.3}, "T": 10.0} },
  "numerics": {"N": [100, 1000]}
})");
    const RunResult r = run_cli("run " + cfg.string(), dir);
    REQUIRE(r.exit_code == 0);
    const auto lines = csv_lines(slurp(dir / "out" / "convergence.csv"));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "N,rule,re,im,abs_error");
}
