#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "isolab/kernels.hpp"
#include "isolab/riemann.hpp"
#include "isolab/viscous.hpp"

namespace isolab {

struct KernelTableConfig {
    double R_min = -2.0, R_max = -0.1;
    int nR = 20;
    double v_min = -2.0, v_max = 2.0;
    int nv = 41;
};

struct RiemannOutputConfig {
    double t = 0.2;
    int n = 400;
};

struct VerifyConfig {
    std::vector<double> sigmas{1.0, 1.5, 2.0};
    int tests = 5;
    int levels = 100;
    double C = 10.0;
};

struct TartarConfig {
    std::filesystem::path measure;
    double B1 = 2.0, B2 = 3.0;
    double W2 = 0.0, Z2 = 0.0;  // 0 means unbounded
    double mollifier_shift = 0.25;
    double mollifier_width = 0.7;
    bool random_mollifiers = false;
};

struct SweepConfig {
    std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
};

/// Everything a subcommand needs; built by parse_config.
struct RunConfig {
    SolverConfig solver;
    KernelConfig kernel;
    RiemannData data{0.5, 0.0, 0.1, 0.0};
    double x_jump = 0.0;
    std::vector<double> output_times;
    KernelTableConfig kernel_table;
    RiemannOutputConfig riemann;
    VerifyConfig verify;
    TartarConfig tartar;
    SweepConfig sweep;

    /// canonical sorted key = value lines of the explicit entries
    std::vector<std::pair<std::string, std::string>> entries;
    std::uint64_t digest = 0;

    /// fnv1a64 as 16 hex digits
    std::string digest_hex() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

/// Flat `section.key = value` lines, `#` comments. Unknown or repeated keys and values that
/// break a module invariant raise ConfigError carrying the line number.
RunConfig parse_config(const std::string& text);

/// Reads and parses a file; relative measure paths resolve against its directory.
RunConfig load_config(const std::filesystem::path& path);

/// Names of every accepted key.
std::vector<std::string> config_keys();

}  // namespace isolab
