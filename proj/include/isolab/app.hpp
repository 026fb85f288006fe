#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "isolab/config.hpp"

namespace isolab {

struct AppOptions {
    std::filesystem::path out = ".";
    int threads = 1;
    std::uint64_t seed = 1;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes its CSV/JSON files under opts.out.
/// Returns 0 when every asserted invariant held, 1 otherwise. Library errors are caught,
/// reported in error.json and mapped to status 2 (configuration) or 3 (anything else).
int dispatch(const std::string& sub, const RunConfig& cfg, const AppOptions& opts);

/// error.json with the error type, message and (for configuration errors) the line.
void write_error_report(const std::filesystem::path& out, const std::exception& e);

/// Runs fn(k) for k in [0, n) on up to `threads` workers; results land by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Atoms from a CSV file with columns W, Z, weight (header row and # comments allowed).
std::vector<std::array<double, 3>> read_measure_csv(const std::filesystem::path& path);

}  // namespace isolab
