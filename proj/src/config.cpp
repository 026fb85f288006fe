#include "isolab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "isolab/errors.hpp"

namespace isolab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Ctx {
    const std::string& key;
    const std::string& value;
    int line;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + why, line);
    }

    double real() const {
        double x = 0.0;
        const char* b = value.data();
        const char* e = b + value.size();
        const auto [p, ec] = std::from_chars(b, e, x);
        if (ec != std::errc() || p != e || !std::isfinite(x)) fail("expected a finite number, got '" + value + "'");
        return x;
    }
    double positive() const {
        const double x = real();
        if (!(x > 0.0)) fail("must be positive");
        return x;
    }
    int integer(int lo) const {
        int x = 0;
        const char* b = value.data();
        const char* e = b + value.size();
        const auto [p, ec] = std::from_chars(b, e, x);
        if (ec != std::errc() || p != e) fail("expected an integer, got '" + value + "'");
        if (x < lo) fail("must be at least " + std::to_string(lo));
        return x;
    }
    bool boolean() const {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        fail("expected true or false");
    }
    std::vector<double> list() const {
        std::vector<double> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            Ctx sub{key, t, line};
            out.push_back(sub.real());
        }
        if (out.empty()) fail("expected a comma separated list");
        return out;
    }
};

using Setter = std::function<void(RunConfig&, const Ctx&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"solver.eps", [](RunConfig& c, const Ctx& x) { c.solver.eps = x.positive(); }},
        {"solver.r", [](RunConfig& c, const Ctx& x) {
             c.solver.r = x.real();
             if (!(c.solver.r > 1.0)) x.fail("needs r > 1");
         }},
        {"solver.lambda", [](RunConfig& c, const Ctx& x) { c.solver.lambda = x.positive(); }},
        {"solver.dx", [](RunConfig& c, const Ctx& x) { c.solver.dx = x.positive(); }},
        {"solver.x_min", [](RunConfig& c, const Ctx& x) { c.solver.x_min = x.real(); }},
        {"solver.domain_length", [](RunConfig& c, const Ctx& x) { c.solver.domain_length = x.positive(); }},
        {"solver.dt_factor", [](RunConfig& c, const Ctx& x) { c.solver.dt_factor = x.positive(); }},
        {"solver.t_final", [](RunConfig& c, const Ctx& x) { c.solver.t_final = x.positive(); }},
        {"solver.bc", [](RunConfig& c, const Ctx& x) {
             if (x.value == "periodic") c.solver.bc = Boundary::periodic;
             else if (x.value == "constant_extension") c.solver.bc = Boundary::constant_extension;
             else x.fail("expected periodic or constant_extension");
         }},
        {"solver.scheme", [](RunConfig& c, const Ctx& x) {
             if (x.value == "heun") c.solver.scheme = TimeScheme::heun;
             else if (x.value == "forward_euler") c.solver.scheme = TimeScheme::forward_euler;
             else x.fail("expected heun or forward_euler");
         }},
        {"solver.mollify_width", [](RunConfig& c, const Ctx& x) {
             c.solver.mollify_width = x.real();
             if (*c.solver.mollify_width < 0.0) x.fail("must be >= 0");
         }},
        {"solver.weight_R", [](RunConfig& c, const Ctx& x) { c.solver.weight_R = x.positive(); }},
        {"solver.invariant_tol", [](RunConfig& c, const Ctx& x) { c.solver.invariant_tol = x.positive(); }},
        {"output.times", [](RunConfig& c, const Ctx& x) {
             c.output_times = x.list();
             if (!std::is_sorted(c.output_times.begin(), c.output_times.end())) x.fail("times must increase");
         }},

        {"kernel.max_terms", [](RunConfig& c, const Ctx& x) { c.kernel.max_terms = x.integer(1); }},
        {"kernel.tail_tol", [](RunConfig& c, const Ctx& x) { c.kernel.tail_tol = x.positive(); }},
        {"kernel.quad_tol", [](RunConfig& c, const Ctx& x) { c.kernel.quad_tol = x.positive(); }},
        {"kernel.R_min", [](RunConfig& c, const Ctx& x) { c.kernel_table.R_min = x.real(); }},
        {"kernel.R_max", [](RunConfig& c, const Ctx& x) { c.kernel_table.R_max = x.real(); }},
        {"kernel.nR", [](RunConfig& c, const Ctx& x) { c.kernel_table.nR = x.integer(1); }},
        {"kernel.v_min", [](RunConfig& c, const Ctx& x) { c.kernel_table.v_min = x.real(); }},
        {"kernel.v_max", [](RunConfig& c, const Ctx& x) { c.kernel_table.v_max = x.real(); }},
        {"kernel.nv", [](RunConfig& c, const Ctx& x) { c.kernel_table.nv = x.integer(1); }},

        {"data.rho_l", [](RunConfig& c, const Ctx& x) { c.data.rho_l = x.positive(); }},
        {"data.u_l", [](RunConfig& c, const Ctx& x) { c.data.u_l = x.real(); }},
        {"data.rho_r", [](RunConfig& c, const Ctx& x) { c.data.rho_r = x.positive(); }},
        {"data.u_r", [](RunConfig& c, const Ctx& x) { c.data.u_r = x.real(); }},
        {"data.x_jump", [](RunConfig& c, const Ctx& x) { c.x_jump = x.real(); }},

        {"riemann.t", [](RunConfig& c, const Ctx& x) { c.riemann.t = x.positive(); }},
        {"riemann.n", [](RunConfig& c, const Ctx& x) { c.riemann.n = x.integer(1); }},

        {"verify.sigmas", [](RunConfig& c, const Ctx& x) {
             c.verify.sigmas = x.list();
             for (double s : c.verify.sigmas)
                 if (!(s > 0.0)) x.fail("widths must be positive");
         }},
        {"verify.tests", [](RunConfig& c, const Ctx& x) { c.verify.tests = x.integer(1); }},
        {"verify.levels", [](RunConfig& c, const Ctx& x) { c.verify.levels = x.integer(4); }},
        {"verify.C", [](RunConfig& c, const Ctx& x) { c.verify.C = x.positive(); }},

        {"tartar.measure", [](RunConfig& c, const Ctx& x) { c.tartar.measure = x.value; }},
        {"tartar.B1", [](RunConfig& c, const Ctx& x) {
             c.tartar.B1 = x.real();
             if (!(c.tartar.B1 > 1.0)) x.fail("needs B > 1");
         }},
        {"tartar.B2", [](RunConfig& c, const Ctx& x) {
             c.tartar.B2 = x.real();
             if (!(c.tartar.B2 > 1.0)) x.fail("needs B > 1");
         }},
        {"tartar.W2", [](RunConfig& c, const Ctx& x) { c.tartar.W2 = x.positive(); }},
        {"tartar.Z2", [](RunConfig& c, const Ctx& x) { c.tartar.Z2 = x.positive(); }},
        {"tartar.mollifier_shift", [](RunConfig& c, const Ctx& x) { c.tartar.mollifier_shift = x.real(); }},
        {"tartar.mollifier_width", [](RunConfig& c, const Ctx& x) { c.tartar.mollifier_width = x.positive(); }},
        {"tartar.random_mollifiers", [](RunConfig& c, const Ctx& x) { c.tartar.random_mollifiers = x.boolean(); }},

        {"sweep.eps", [](RunConfig& c, const Ctx& x) {
             c.sweep.eps = x.list();
             for (double e : c.sweep.eps)
                 if (!(e > 0.0)) x.fail("eps values must be positive");
         }},
    };
    return table;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string RunConfig::digest_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    // every subcommand runs Riemann data
    cfg.solver.bc = Boundary::constant_extension;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("line " + std::to_string(line) + ": unknown key " + key, line);
        if (seen.count(key))
            throw ConfigError("line " + std::to_string(line) + ": " + key + " repeats line " +
                                  std::to_string(seen[key]), line);
        if (value.empty())
            throw ConfigError("line " + std::to_string(line) + ": " + key + ": empty value", line);
        seen[key] = line;
        it->second(cfg, Ctx{key, value, line});
        cfg.entries.emplace_back(key, value);
    }

    auto check = [&](const char* key, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const DomainError& e) {
            const int l = seen.count(key) ? seen[key] : 0;
            throw ConfigError(std::string(key) + ": " + e.what(), l);
        }
    };
    check("solver.eps", [&] { cfg.solver.finalize(); });
    check("kernel.max_terms", [&] { cfg.kernel.validate(); });
    check("data.rho_l", [&] { cfg.data.validate(); });
    auto order = [&](const char* key, bool ok, const char* why) {
        if (!ok) throw ConfigError(std::string(key) + ": " + why, seen.count(key) ? seen[key] : 0);
    };
    order("kernel.R_max", cfg.kernel_table.R_min <= cfg.kernel_table.R_max && cfg.kernel_table.R_max <= 0.0,
          "needs R_min <= R_max <= 0");
    order("kernel.v_max", cfg.kernel_table.v_min <= cfg.kernel_table.v_max, "needs v_min <= v_max");
    order("tartar.B2", cfg.tartar.B1 != cfg.tartar.B2, "needs B1 != B2");
    order("tartar.mollifier_width",
          std::abs(cfg.tartar.mollifier_shift) + cfg.tartar.mollifier_width <= 1.0,
          "shifted bumps must stay inside (-1, 1)");
    for (double t : cfg.output_times)
        order("output.times", t > 0.0 && t <= cfg.solver.t_final, "times must lie in (0, t_final]");

    std::sort(cfg.entries.begin(), cfg.entries.end());
    std::string canon;
    for (const auto& [k, v] : cfg.entries) canon += k + "=" + v + "\n";
    cfg.digest = fnv1a64(canon);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path.string(), 0);
    std::stringstream ss;
    ss << f.rdbuf();
    RunConfig cfg = parse_config(ss.str());
    if (!cfg.tartar.measure.empty() && cfg.tartar.measure.is_relative())
        cfg.tartar.measure = path.parent_path() / cfg.tartar.measure;
    return cfg;
}

}  // namespace isolab
