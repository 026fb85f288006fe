#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "isolab/app.hpp"
#include "isolab/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"isothermal gas dynamics laboratory"};
    app.require_subcommand(1, 1);
    std::string config_path;
    isolab::AppOptions opts;
    std::string out = ".";
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", opts.seed, "seed for randomized mollifiers and test functions");
    for (const auto& name : isolab::subcommands()) app.add_subcommand(name)->fallthrough();
    CLI11_PARSE(app, argc, argv);
    opts.out = out;

    const std::string sub = app.get_subcommands().front()->get_name();
    isolab::RunConfig cfg;
    try {
        cfg = config_path.empty() ? isolab::parse_config("") : isolab::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "isolab: " << e.what() << "\n";
        isolab::write_error_report(opts.out, e);
        return 2;
    }
    const int status = isolab::dispatch(sub, cfg, opts);
    if (status >= 2) std::cerr << "isolab: " << sub << " failed, see " << (opts.out / "error.json").string() << "\n";
    return status;
}
