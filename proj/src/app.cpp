#include "isolab/app.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"
#include "isolab/riemann.hpp"
#include "isolab/verifier.hpp"
#include "isolab/viscous.hpp"
#include "isolab/young.hpp"

namespace isolab {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Csv {
public:
    Csv(const std::filesystem::path& path, const RunConfig& cfg, const std::vector<std::string>& header)
        : f_(path) {
        if (!f_) throw Error("cannot write " + path.string());
        f_ << "# config-digest: " << cfg.digest_hex() << "\n";
        for (std::size_t k = 0; k < header.size(); ++k) f_ << (k ? "," : "") << header[k];
        f_ << "\n";
    }
    void row(const std::vector<double>& v) {
        for (std::size_t k = 0; k < v.size(); ++k) f_ << (k ? "," : "") << fmt(v[k]);
        f_ << "\n";
    }

private:
    std::ofstream f_;
};

void write_json(const std::filesystem::path& path, const RunConfig& cfg, json j) {
    j["config_digest"] = cfg.digest_hex();
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << j.dump(2) << "\n";
}

// doubles survive the JSON round trip, non-finite values become null
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

RunResult run_riemann_data(const RunConfig& cfg, SolverConfig solver, std::vector<double> times) {
    solver.finalize();
    const auto d = step_initial_data(make_grid(solver), cfg.data.rho_l, cfg.data.u_l, cfg.data.rho_r,
                                     cfg.data.u_r, cfg.x_jump);
    RunOptions o;
    o.output_times = std::move(times);
    return run(d, solver, o);
}

void write_state(const std::filesystem::path& path, const RunConfig& cfg, const Grid& g,
                 const std::vector<GridState>& states) {
    Csv csv(path, cfg, {"t", "x", "rho", "m", "u"});
    for (const auto& s : states) {
        const auto u = s.u();
        for (int i = 0; i < g.n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            csv.row({s.t, g.x(i), s.rho[k], s.m[k], u[k]});
        }
    }
}

json positivity_json(const PositivityCertificate& p) {
    return {{"margin", num(p.margin)}, {"t", num(p.t)}, {"x", num(p.x)}, {"floor", num(p.floor)}, {"ok", p.ok}};
}

double l1_per_jump(const RunConfig& cfg, const RunResult& r) {
    const auto fan = solve_riemann(cfg.data);
    const auto& s = r.trajectory.back();
    std::vector<double> xs(static_cast<std::size_t>(r.grid.n));
    for (int i = 0; i < r.grid.n; ++i) xs[static_cast<std::size_t>(i)] = r.grid.x(i);
    const auto [rho, u] = sample_fan_on(fan, xs, s.t, cfg.x_jump);
    const auto uu = s.u();
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) d += (std::abs(s.rho[i] - rho[i]) + std::abs(uu[i] - u[i])) * r.grid.dx;
    const double jump = std::abs(cfg.data.rho_l - cfg.data.rho_r) + std::abs(cfg.data.u_l - cfg.data.u_r);
    return jump > 0.0 ? d / jump : d;
}

int cmd_solve(const RunConfig& cfg, const AppOptions& o) {
    const auto r = run_riemann_data(cfg, cfg.solver, cfg.output_times);
    write_state(o.out / "solution.csv", cfg, r.grid, r.trajectory);
    Csv steps(o.out / "steps.csv", cfg, {"t", "dt", "min_rho", "x_min_rho", "max_w", "min_z"});
    for (const auto& s : r.steps) steps.row({s.t, s.dt, s.min_rho, s.x_min_rho, s.max_w, s.min_z});
    const auto p = positivity_certificate(r);
    const auto inv = invariant_report(r);
    write_json(o.out / "report.json", cfg,
               {{"subcommand", "solve"},
                {"eps", cfg.solver.eps},
                {"eps1", r.eps1},
                {"eps2", r.eps2},
                {"steps", r.steps.size() - 1},
                {"positivity", positivity_json(p)},
                {"w_drift", num(inv.w_drift)},
                {"z_drift", num(inv.z_drift)},
                {"dissipation", num(r.dissipation.value)}});
    return p.ok ? 0 : 1;
}

int cmd_kernel(const RunConfig& cfg, const AppOptions& o) {
    const auto& t = cfg.kernel_table;
    Csv csv(o.out / "kernel.csv", cfg, {"R", "v", "chi", "h", "G_chi", "G_h"});
    for (int i = 0; i < t.nR; ++i) {
        const double R = t.nR == 1 ? t.R_min : t.R_min + (t.R_max - t.R_min) * i / (t.nR - 1);
        for (int j = 0; j < t.nv; ++j) {
            const double v = t.nv == 1 ? t.v_min : t.v_min + (t.v_max - t.v_min) * j / (t.nv - 1);
            const KernelPoint p{R, v, 0.0};
            // h jumps across v = 0
            const double h = v == 0.0 ? std::nan("") : eval_h(p, cfg.kernel);
            csv.row({R, v, eval_chi(p, cfg.kernel), h, eval_G_chi(R, v, cfg.kernel), eval_G_h(R, v, cfg.kernel)});
        }
    }
    Csv series(o.out / "series.csv", cfg, {"m", "f", "f1", "f2"});
    for (int k = 0; k <= 100; ++k) {
        const double m = -10.0 + 0.2 * k;
        const auto d = eval_f_derivs(m, cfg.kernel);
        series.row({m, d.f, d.f1, d.f2});
    }
    return 0;
}

int cmd_riemann(const RunConfig& cfg, const AppOptions& o) {
    const auto fan = solve_riemann(cfg.data);
    const double x0 = cfg.solver.x_min, L = cfg.solver.domain_length;
    std::vector<double> xs(static_cast<std::size_t>(cfg.riemann.n));
    for (int i = 0; i < cfg.riemann.n; ++i) xs[static_cast<std::size_t>(i)] = x0 + (i + 0.5) * L / cfg.riemann.n;
    const auto [rho, u] = sample_fan_on(fan, xs, cfg.riemann.t, cfg.x_jump);
    Csv csv(o.out / "riemann.csv", cfg, {"x", "rho", "u"});
    for (std::size_t i = 0; i < xs.size(); ++i) csv.row({xs[i], rho[i], u[i]});
    auto wave = [](const Wave& w) {
        const char* type = w.type == WaveType::shock ? "shock" : w.type == WaveType::rarefaction ? "rarefaction" : "none";
        return json{{"type", type}, {"speed_lo", w.speed_lo}, {"speed_hi", w.speed_hi}};
    };
    const bool ok = fan.wave1.type != WaveType::shock && fan.wave2.type != WaveType::shock
                        ? true
                        : fan_rh_residual(fan) <= 1e-10;
    write_json(o.out / "fan.json", cfg,
               {{"subcommand", "riemann"},
                {"rho_m", fan.rho_m},
                {"u_m", fan.u_m},
                {"wave1", wave(fan.wave1)},
                {"wave2", wave(fan.wave2)},
                {"rh_residual", fan_rh_residual(fan)},
                {"admissible", fan_is_admissible(fan)}});
    return ok && fan_is_admissible(fan) ? 0 : 1;
}

std::vector<TestFunction> random_tests(const RunConfig& cfg, std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    const double L = cfg.solver.domain_length, T = cfg.solver.t_final;
    const double mid = cfg.x_jump;
    std::uniform_real_distribution<double> xc(mid - 0.15 * L, mid + 0.15 * L), hx(0.05 * L, 0.15 * L);
    std::uniform_real_distribution<double> tc(0.4 * T, 0.6 * T), ht(0.1 * T, 0.3 * T), amp(0.5, 2.0);
    std::vector<TestFunction> out;
    for (int k = 0; k < count; ++k) {
        const double c = xc(rng), w = hx(rng), s = tc(rng), h = ht(rng), a = amp(rng);
        out.push_back(make_test_function(c, w, s, h, a));
    }
    return out;
}

int cmd_verify(const RunConfig& cfg, const AppOptions& o) {
    SolverConfig solver = cfg.solver;
    solver.finalize();
    const int nt = cfg.verify.levels;
    std::vector<double> times;
    for (int k = 1; k < nt; ++k) times.push_back(solver.t_final * k / nt);
    const auto r = run_riemann_data(cfg, solver, times);
    const auto st = SpaceTime::from_run(r);
    const auto fan = solve_riemann(cfg.data);
    const auto exact = sample_exact(fan, r.grid, solver.t_final, nt, cfg.x_jump);
    const auto phis = random_tests(cfg, o.seed, cfg.verify.tests);
    for (const auto& phi : phis) validate_support(phi, st);

    const int np = static_cast<int>(cfg.verify.sigmas.size());
    std::vector<EntropyPair> pairs;
    for (double s : cfg.verify.sigmas) {
        auto p = EntropyPair::tabulate(gaussian_generator(s, 801, 0.5 * (cfg.data.u_l + cfg.data.u_r)),
                                       EntropyPair::realized_box(st), 40, 40, cfg.kernel,
                                       "gaussian sigma " + fmt(s));
        p.require_convex();
        pairs.push_back(std::move(p));
    }
    std::vector<std::vector<double>> viscous(static_cast<std::size_t>(np)), sharp(viscous);
    parallel_for(np, o.threads, [&](int k) {
        const auto kk = static_cast<std::size_t>(k);
        viscous[kk] = entropy_inequality_residuals(st, pairs[kk], phis);
        sharp[kk] = entropy_inequality_residuals(exact, pairs[kk], phis);
    });

    const double bound = -cfg.verify.C * (solver.eps + solver.dx * solver.dx);
    bool ok = true;
    Csv csv(o.out / "residuals.csv", cfg, {"pair", "test", "sigma", "viscous", "exact", "bound"});
    for (int k = 0; k < np; ++k) {
        for (std::size_t j = 0; j < phis.size(); ++j) {
            const double v = viscous[static_cast<std::size_t>(k)][j];
            const double e = sharp[static_cast<std::size_t>(k)][j];
            ok = ok && v >= bound;
            csv.row({static_cast<double>(k), static_cast<double>(j), cfg.verify.sigmas[static_cast<std::size_t>(k)], v, e, bound});
        }
    }
    json cons = json::array();
    for (const auto& phi : phis) {
        const auto c = conservation_residual(st, phi);
        cons.push_back({{"mass", num(c.mass)}, {"momentum", num(c.momentum)}});
    }
    json certs = json::array();
    for (const auto& p : pairs) certs.push_back({{"name", p.name()}, {"convexity", num(p.convexity_certificate())}});
    const auto th = theta_diagnostic(st, pairs.front(), solver, 0.5 * solver.t_final, solver.t_final);
    write_json(o.out / "verify.json", cfg,
               {{"subcommand", "verify"},
                {"seed", o.seed},
                {"bound", bound},
                {"entropy_sign_ok", ok},
                {"pairs", certs},
                {"conservation", cons},
                {"theta",
                 {{"eps_eta_x_L2", num(th.eps_eta_x_L2)},
                  {"quadratic_L1", num(th.quadratic_L1)},
                  {"eps1_terms_L2", num(th.eps1_terms_L2)}}},
                {"positivity", positivity_json(positivity_certificate(r))}});
    return ok ? 0 : 1;
}

int cmd_tartar(const RunConfig& cfg, const AppOptions& o) {
    DiscreteMeasure nu;
    for (const auto& a : read_measure_csv(cfg.tartar.measure)) nu.atoms.push_back({a[0], a[1], a[2]});
    if (cfg.tartar.W2 > 0.0) nu.W2 = cfg.tartar.W2;
    if (cfg.tartar.Z2 > 0.0) nu.Z2 = cfg.tartar.Z2;
    nu.validate();

    const auto p1 = PowerEntropyPair::make(cfg.tartar.B1), p2 = PowerEntropyPair::make(cfg.tartar.B2);
    const double residual = commutation_residual(nu, p1.functions(), p2.functions());
    const auto verdict = support_reduction_classify(nu);

    double c2 = -cfg.tartar.mollifier_shift, c3 = cfg.tartar.mollifier_shift, w = cfg.tartar.mollifier_width;
    if (cfg.tartar.random_mollifiers) {
        std::mt19937_64 rng(o.seed);
        std::uniform_real_distribution<double> width(0.3, 0.8);
        w = width(rng);
        std::uniform_real_distribution<double> centre(-(1.0 - w), 1.0 - w);
        c2 = centre(rng);
        c3 = centre(rng);
    }
    const auto phi2 = Mollifier::bump(c2, w), phi3 = Mollifier::bump(c3, w);
    auto coeffs = [](const MollifierCoefficients& c) {
        return json{{"B_minus", c.B_minus}, {"C_minus", c.C_minus}, {"B_plus", c.B_plus}, {"C_plus", c.C_plus}};
    };

    json dich = nullptr;
    if (verdict.kind == Verdict::Kind::dirac_plus_vacuum && verdict.alpha > 0.0) {
        const auto d = dichotomy_check(verdict.alpha, verdict.W, verdict.Z, cfg.tartar.B1, cfg.tartar.B2);
        dich = {{"residual", d.residual}, {"predicted", d.predicted}};
    }
    json compat = json::array();
    for (const auto& a : nu.atoms) {
        if (a.vacuum()) continue;
        const auto c1 = compatibility_residual(p1.functions(), a.rho(), a.u());
        compat.push_back({{"W", a.W}, {"Z", a.Z}, {"q_rho", num(c1.q_rho)}, {"q_m", num(c1.q_m)}});
    }
    Csv dcsv(o.out / "D_of_R.csv", cfg, {"R", "D", "D_step3", "half_exp"});
    for (int k = 0; k <= 60; ++k) {
        const double R = -6.0 + 0.1 * k;
        dcsv.row({R, D_of_R(R), D_of_R_step3(R), 0.5 * std::exp(0.5 * R)});
    }
    write_json(o.out / "tartar.json", cfg,
               {{"subcommand", "tartar"},
                {"atoms", nu.atoms.size()},
                {"commutation_residual", residual},
                {"verdict",
                 {{"kind", verdict.kind == Verdict::Kind::dirac_plus_vacuum ? "dirac_plus_vacuum" : "violates_reduction"},
                  {"alpha", verdict.alpha},
                  {"W", verdict.W},
                  {"Z", verdict.Z},
                  {"first", verdict.first},
                  {"second", verdict.second},
                  {"reason", verdict.reason}}},
                {"dichotomy", dich},
                {"power_flux_compatibility", compat},
                {"mollifiers", {{"phi2_centre", c2}, {"phi3_centre", c3}, {"half_width", w}}},
                {"coefficients_23", coeffs(mollifier_coefficients(phi2, phi3))},
                {"coefficients_32", coeffs(mollifier_coefficients(phi3, phi2))},
                {"Y", compute_Y(phi2, phi3)}});
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const AppOptions& o) {
    const int n = static_cast<int>(cfg.sweep.eps.size());
    if (n < 2) throw ConfigError("sweep.eps: needs at least two values", 0);
    std::vector<RunResult> runs(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    parallel_for(n, o.threads, [&](int k) {
        try {
            SolverConfig s = cfg.solver;
            s.eps = cfg.sweep.eps[static_cast<std::size_t>(k)];
            runs[static_cast<std::size_t>(k)] = run_riemann_data(cfg, s, {});
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    bool ok = true;
    std::vector<SpaceTime> finals;
    Csv table(o.out / "dissipation.csv", cfg, {"eps", "dissipation", "l1_per_jump", "positivity_margin", "w_drift", "z_drift"});
    json rows = json::array();
    for (int k = 0; k < n; ++k) {
        const auto& r = runs[static_cast<std::size_t>(k)];
        const auto p = positivity_certificate(r);
        const auto inv = invariant_report(r);
        const double l1 = l1_per_jump(cfg, r);
        ok = ok && p.ok;
        const double eps = cfg.sweep.eps[static_cast<std::size_t>(k)];
        table.row({eps, r.dissipation.value, l1, p.margin, inv.w_drift, inv.z_drift});
        rows.push_back({{"eps", eps}, {"dissipation", num(r.dissipation.value)}, {"l1_per_jump", num(l1)},
                        {"positivity", positivity_json(p)}});
        write_state(o.out / ("final_" + std::to_string(k) + ".csv"), cfg, r.grid, {r.trajectory.back()});
        finals.push_back({r.grid, {r.trajectory.back()}});
    }
    const auto sc = strong_convergence_diagnostic(finals);
    Csv cauchy(o.out / "cauchy.csv", cfg, {"function", "k", "distance"});
    json dist = json::object();
    for (std::size_t f = 0; f < sc.names.size(); ++f) {
        for (std::size_t k = 0; k < sc.distances[f].size(); ++k)
            cauchy.row({static_cast<double>(f), static_cast<double>(k), sc.distances[f][k]});
        dist[sc.names[f]] = sc.distances[f];
    }
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : runs) {
        lo = std::min(lo, r.dissipation.value);
        hi = std::max(hi, r.dissipation.value);
    }
    write_json(o.out / "sweep.json", cfg,
               {{"subcommand", "sweep"},
                {"runs", rows},
                {"dissipation_variation", hi > 0.0 ? (hi - lo) / hi : 0.0},
                {"function_order", sc.names},
                {"cauchy_distances", dist},
                {"cauchy", sc.cauchy}});
    return ok ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"solve", "kernel", "verify", "tartar", "riemann", "sweep"};
    return s;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(threads, n));
    if (workers == 1) {
        for (int k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int k = next++; k < n; k = next++) fn(k);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<std::array<double, 3>> read_measure_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("tartar.measure: cannot read " + path.string(), 0);
    std::vector<std::array<double, 3>> out;
    std::string line;
    int no = 0;
    while (std::getline(f, line)) {
        ++no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::array<double, 3> a{};
        std::string cell;
        int k = 0;
        bool numeric = true;
        while (std::getline(ss, cell, ',') && k < 3) {
            try {
                std::size_t used = 0;
                a[static_cast<std::size_t>(k)] = std::stod(cell, &used);
            } catch (const std::exception&) {
                numeric = false;
            }
            ++k;
        }
        if (!numeric && out.empty() && no == 1) continue;  // header
        if (!numeric || k != 3) throw ConfigError(path.string() + ": bad atom on line " + std::to_string(no), no);
        out.push_back(a);
    }
    return out;
}

void write_error_report(const std::filesystem::path& out, const std::exception& e) {
    std::string type = "error";
    json j;
    if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
        type = "config";
        j["line"] = c->line();
    } else if (dynamic_cast<const DomainError*>(&e)) {
        type = "domain";
    } else if (dynamic_cast<const StabilityError*>(&e)) {
        type = "stability";
    } else if (dynamic_cast<const PreconditionError*>(&e)) {
        type = "precondition";
    } else if (dynamic_cast<const PrecisionError*>(&e)) {
        type = "precision";
    } else if (dynamic_cast<const NumericalError*>(&e)) {
        type = "numerical";
    }
    j["type"] = type;
    j["message"] = e.what();
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    std::ofstream f(out / "error.json");
    f << j.dump(2) << "\n";
}

int dispatch(const std::string& sub, const RunConfig& cfg, const AppOptions& opts) {
    try {
        std::filesystem::create_directories(opts.out);
        if (sub == "solve") return cmd_solve(cfg, opts);
        if (sub == "kernel") return cmd_kernel(cfg, opts);
        if (sub == "verify") return cmd_verify(cfg, opts);
        if (sub == "riemann") return cmd_riemann(cfg, opts);
        if (sub == "sweep") return cmd_sweep(cfg, opts);
        if (sub == "tartar") {
            if (cfg.tartar.measure.empty()) throw ConfigError("tartar.measure: required for tartar", 0);
            if (!std::filesystem::exists(cfg.tartar.measure))
                throw ConfigError("tartar.measure: no such file " + cfg.tartar.measure.string(), 0);
            return cmd_tartar(cfg, opts);
        }
        throw ConfigError("unknown subcommand " + sub, 0);
    } catch (const ConfigError& e) {
        write_error_report(opts.out, e);
        return 2;
    } catch (const std::exception& e) {
        write_error_report(opts.out, e);
        return 3;
    }
}

}  // namespace isolab
