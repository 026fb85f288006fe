#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isolab/app.hpp"
#include "isolab/config.hpp"
#include "isolab/errors.hpp"

using namespace isolab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("isolab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int config_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("config defaults") {
    const auto c = parse_config("");
    CHECK(c.solver.r == 1.5);
    CHECK(c.solver.dt_factor == 0.4);
    CHECK(c.kernel.tail_tol == 1e-14);
    CHECK(c.solver.bc == Boundary::constant_extension);
    CHECK(c.entries.empty());
    CHECK(c.sweep.eps.size() == 3);
}

TEST_CASE("config parsing and validation") {
    const auto c = parse_config("# header\n\nsolver.eps = 5e-3   # trailing\nsolver.bc = periodic\n"
                                "sweep.eps = 1e-2, 5e-3\ntartar.random_mollifiers = true\n");
    CHECK(c.solver.eps == 5e-3);
    CHECK(c.solver.bc == Boundary::periodic);
    CHECK(c.sweep.eps == std::vector<double>{1e-2, 5e-3});
    CHECK(c.tartar.random_mollifiers);
    CHECK(c.solver.eps1 == doctest::Approx(std::pow(5e-3, 1.5)));

    CHECK(config_error_line("solver.r = 0.9\n") == 1);
    CHECK(config_error_line("\n# c\nsolver.r = 1.0\n") == 3);
    CHECK(config_error("solver.epsilon_two = 1\n").find("solver.epsilon_two") != std::string::npos);
    CHECK(config_error_line("solver.eps = 1\nsolver.eps = 2\n") == 2);
    CHECK(config_error_line("solver.eps = abc\n") == 1);
    CHECK(config_error_line("solver.eps\n") == 1);
    CHECK(config_error_line("solver.eps = -1\n") == 1);
    CHECK(config_error_line("kernel.nR = 2.5\n") == 1);
    CHECK(config_error_line("solver.bc = open\n") == 1);
    CHECK(config_error_line("tartar.B1 = 0.5\n") == 1);
    CHECK(config_error_line("tartar.B1 = 3\ntartar.B2 = 3\n") == 2);
    CHECK(config_error_line("output.times = 0.2, 0.1\n") == 1);
    CHECK(config_error_line("solver.t_final = 0.1\noutput.times = 0.5\n") == 2);
    CHECK(config_error_line("data.rho_l = 0\n") == 1);
    CHECK(config_error_line("kernel.R_max = 0.5\n") == 1);
    CHECK(config_keys().size() > 30);
}

TEST_CASE("config digest") {
    const auto a = parse_config("solver.eps = 0.01\ndata.u_l = 1\n");
    const auto b = parse_config("# comment\ndata.u_l   =   1\nsolver.eps = 0.01\n");
    const auto c = parse_config("solver.eps = 0.02\ndata.u_l = 1\n");
    CHECK(a.digest == b.digest);
    CHECK(a.digest != c.digest);
    CHECK(a.digest_hex().size() == 16);
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("parallel_for visits every index once") {
    for (int threads : {1, 3, 16}) {
        std::vector<std::atomic<int>> hits(37);
        parallel_for(37, threads, [&](int k) { hits[static_cast<std::size_t>(k)]++; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("riemann subcommand with equal states") {
    const auto out = scratch("riemann");
    const auto cfg = parse_config("data.rho_l = 0.3\ndata.rho_r = 0.3\ndata.u_l = 0.1\ndata.u_r = 0.1\nriemann.n = 50\n");
    CHECK(dispatch("riemann", cfg, {out, 1, 1}) == 0);
    int csvs = 0;
    for (const auto& e : fs::directory_iterator(out)) csvs += e.path().extension() == ".csv";
    CHECK(csvs == 1);
    std::istringstream text(slurp(out / "riemann.csv"));
    std::string line;
    std::getline(text, line);
    CHECK(line == "# config-digest: " + cfg.digest_hex());
    std::getline(text, line);
    CHECK(line == "x,rho,u");
    int rows = 0;
    while (std::getline(text, line)) {
        const auto c1 = line.find(','), c2 = line.rfind(',');
        CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == 0.3);
        CHECK(std::stod(line.substr(c2 + 1)) == 0.1);
        ++rows;
    }
    CHECK(rows == 50);
}

TEST_CASE("solve rejects oversized steps") {
    const auto out = scratch("solve_bad");
    const auto cfg = parse_config("solver.dt_factor = 2.0\nsolver.t_final = 0.02\ndata.rho_l = 1\ndata.rho_r = 0.01\n");
    CHECK(dispatch("solve", cfg, {out, 1, 1}) != 0);
    CHECK(slurp(out / "error.json").find("stability") != std::string::npos);

    const auto ok = scratch("solve_ok");
    CHECK(dispatch("solve", parse_config("solver.t_final = 0.01\n"), {ok, 1, 1}) == 0);
    CHECK(fs::exists(ok / "solution.csv"));
    CHECK(fs::exists(ok / "steps.csv"));
    CHECK(slurp(ok / "report.json").find("\"ok\": true") != std::string::npos);
}

TEST_CASE("sweep emits trajectories and a Cauchy table, identically across thread counts") {
    const std::string text =
        "data.rho_l = 0.05\ndata.u_l = 0.5\ndata.rho_r = 0.2\ndata.u_r = -0.4\n"
        "solver.dx = 0.005\nsolver.t_final = 0.1\n";
    const auto cfg = parse_config(text);
    const auto a = scratch("sweep1"), b = scratch("sweep3");
    CHECK(dispatch("sweep", cfg, {a, 1, 1}) == 0);
    CHECK(dispatch("sweep", cfg, {b, 3, 1}) == 0);
    for (const char* f : {"final_0.csv", "final_1.csv", "final_2.csv", "cauchy.csv", "dissipation.csv", "sweep.json"}) {
        CHECK(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "sweep.json").find("\"cauchy\": true") != std::string::npos);
}

TEST_CASE("verify subcommand") {
    const auto cfg = parse_config("data.rho_l = 0.2\ndata.u_l = 0.3\ndata.rho_r = 0.2\ndata.u_r = -0.3\n"
                                  "solver.t_final = 0.2\nsolver.dx = 0.01\nverify.levels = 40\n");
    const auto out = scratch("verify");
    CHECK(dispatch("verify", cfg, {out, 2, 5}) == 0);
    CHECK(slurp(out / "verify.json").find("\"entropy_sign_ok\": true") != std::string::npos);
    const auto again = scratch("verify2");
    CHECK(dispatch("verify", cfg, {again, 1, 5}) == 0);
    CHECK(slurp(out / "residuals.csv") == slurp(again / "residuals.csv"));
}

TEST_CASE("tartar subcommand") {
    const auto dir = scratch("tartar");
    {
        std::ofstream f(dir / "nu.csv");
        f << "W,Z,weight\n0.2,0.1,0.4\n0,0.3,0.6\n";
    }
    {
        std::ofstream f(dir / "run.cfg");
        f << "tartar.measure = nu.csv\n";
    }
    const auto cfg = load_config(dir / "run.cfg");
    CHECK(dispatch("tartar", cfg, {dir / "out", 1, 1}) == 0);
    const auto report = slurp(dir / "out" / "tartar.json");
    CHECK(report.find("dirac_plus_vacuum") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "D_of_R.csv"));

    const auto atoms = read_measure_csv(dir / "nu.csv");
    REQUIRE(atoms.size() == 2);
    CHECK(atoms[0][2] == 0.4);

    CHECK(dispatch("tartar", parse_config(""), {dir / "none", 1, 1}) == 2);
    CHECK(dispatch("tartar", parse_config("tartar.measure = /nonexistent.csv\n"), {dir / "gone", 1, 1}) == 2);
    CHECK(slurp(dir / "gone" / "error.json").find("config") != std::string::npos);
    CHECK(dispatch("bogus", parse_config(""), {dir / "bogus", 1, 1}) == 2);
}

TEST_CASE("kernel subcommand") {
    const auto out = scratch("kernel");
    CHECK(dispatch("kernel", parse_config("kernel.nR = 3\nkernel.nv = 5\n"), {out, 1, 1}) == 0);
    CHECK(fs::exists(out / "kernel.csv"));
    CHECK(fs::exists(out / "series.csv"));
}
