#include "isolab/viscous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "isolab/errors.hpp"
#include "isolab/quadrature.hpp"

namespace isolab {

SolverConfig& SolverConfig::finalize() {
    auto bad = [](const std::string& m) { throw DomainError("SolverConfig: " + m); };
    if (!(eps > 0.0) || !std::isfinite(eps)) bad("eps must be positive");
    if (!(r > 1.0) || !std::isfinite(r)) bad("r must exceed 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) bad("lambda must be positive");
    if (!(dx > 0.0) || !std::isfinite(dx)) bad("dx must be positive");
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) bad("domain_length must be positive");
    if (!std::isfinite(x_min)) bad("x_min must be finite");
    if (!(dt_factor > 0.0) || !std::isfinite(dt_factor)) bad("dt_factor must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) bad("t_final must be positive");
    if (mollify_width && !(*mollify_width >= 0.0)) bad("mollify_width must be nonnegative");
    if (!(weight_R > 0.0)) bad("weight_R must be positive");
    if (!(invariant_tol > 0.0)) bad("invariant_tol must be positive");
    const double n = std::round(domain_length / dx);
    if (n < 4 || std::abs(n * dx - domain_length) > 1e-9 * domain_length)
        bad("domain_length must be a multiple of dx with at least 4 cells");
    eps1 = std::pow(eps, r);
    return *this;
}

int SolverConfig::cells() const { return static_cast<int>(std::round(domain_length / dx)); }

Grid make_grid(const SolverConfig& cfg) { return {cfg.x_min, cfg.dx, cfg.cells()}; }

InitialData InitialData::from_samples(std::vector<double> rho0, std::vector<double> u0) {
    InitialData d;
    d.rho0 = std::move(rho0);
    d.u0 = std::move(u0);
    if (d.rho0.size() != d.u0.size() || d.rho0.empty())
        throw DomainError("InitialData: rho0 and u0 must have the same nonzero length");
    for (std::size_t i = 0; i < d.rho0.size(); ++i) {
        d.M = std::max(d.M, d.rho0[i]);
        d.u1 = std::max(d.u1, std::abs(d.u0[i]));
        if (d.rho0[i] > 0.0)
            d.c0 = std::max(d.c0, std::abs(d.u0[i]) / (1.0 + std::abs(std::log(d.rho0[i]))));
    }
    d.validate();
    return d;
}

void InitialData::validate() const {
    if (rho0.size() != u0.size() || rho0.empty())
        throw DomainError("InitialData: rho0 and u0 must have the same nonzero length");
    for (std::size_t i = 0; i < rho0.size(); ++i) {
        if (!std::isfinite(rho0[i]) || !std::isfinite(u0[i]))
            throw DomainError("InitialData: non-finite sample");
        if (rho0[i] < 0.0) throw DomainError("InitialData: negative density");
        if (rho0[i] > 0.0) {
            const double bound = c0 * rho0[i] * (1.0 + std::abs(std::log(rho0[i])));
            if (rho0[i] * std::abs(u0[i]) > bound * (1.0 + 1e-12))
                throw DomainError("InitialData: momentum growth bound violated");
        }
    }
}

InitialData sample_initial_data(const Grid& g, const std::function<double(double)>& rho,
                                const std::function<double(double)>& u) {
    std::vector<double> r(static_cast<std::size_t>(g.n)), v(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        r[static_cast<std::size_t>(i)] = rho(g.x(i));
        v[static_cast<std::size_t>(i)] = u(g.x(i));
    }
    return InitialData::from_samples(std::move(r), std::move(v));
}

InitialData step_initial_data(const Grid& g, double rho_l, double u_l, double rho_r, double u_r,
                              double x_jump) {
    return sample_initial_data(
        g, [=](double x) { return x < x_jump ? rho_l : rho_r; },
        [=](double x) { return x < x_jump ? u_l : u_r; });
}

std::vector<double> GridState::u() const {
    std::vector<double> v(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) v[i] = m[i] / rho[i];
    return v;
}

std::pair<std::vector<double>, std::vector<double>> mollify_initial_data(const InitialData& data,
                                                                         const SolverConfig& cfg) {
    data.validate();
    const auto n = static_cast<long>(data.rho0.size());
    const double width = cfg.width();
    std::vector<double> rho = data.rho0, u = data.u0;
    if (width > 0.0) {
        const long half = static_cast<long>(std::ceil(3.0 * width / cfg.dx));
        std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
        double total = 0.0;
        for (long k = -half; k <= half; ++k) {
            const double x = k * cfg.dx;
            w[static_cast<std::size_t>(k + half)] = std::exp(-x * x / (2.0 * width * width));
            total += w[static_cast<std::size_t>(k + half)];
        }
        for (double& x : w) x /= total;
        auto index = [&](long j) {
            if (cfg.bc == Boundary::periodic) return ((j % n) + n) % n;
            return std::clamp(j, 0L, n - 1);
        };
        for (long i = 0; i < n; ++i) {
            double sr = 0.0, su = 0.0;
            for (long k = -half; k <= half; ++k) {
                const auto j = static_cast<std::size_t>(index(i + k));
                sr += w[static_cast<std::size_t>(k + half)] * data.rho0[j];
                su += w[static_cast<std::size_t>(k + half)] * data.u0[j];
            }
            // a convex combination cannot leave [min, max]; clip rounding overshoot
            rho[static_cast<std::size_t>(i)] = std::clamp(sr, 0.0, data.M);
            u[static_cast<std::size_t>(i)] = std::clamp(su, -data.u1, data.u1);
        }
    }
    const double floor = 2.0 * cfg.eps2();
    for (double& r : rho) r += floor;
    return {std::move(rho), std::move(u)};
}

GridState initial_state(const InitialData& data, const SolverConfig& cfg) {
    auto [rho, u] = mollify_initial_data(data, cfg);
    GridState s;
    s.rho = std::move(rho);
    s.m.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) s.m[i] = s.rho[i] * u[i];
    s.ghosts = {s.rho.front(), s.m.front(), s.rho.back(), s.m.back()};
    return s;
}

namespace {

struct Extended {
    std::vector<double> rho, m;  // size n + 2, ghost cells at both ends
};

Extended extend(const std::vector<double>& rho, const std::vector<double>& m, const Ghosts& g,
                Boundary bc) {
    const std::size_t n = rho.size();
    Extended e;
    e.rho.resize(n + 2);
    e.m.resize(n + 2);
    std::copy(rho.begin(), rho.end(), e.rho.begin() + 1);
    std::copy(m.begin(), m.end(), e.m.begin() + 1);
    if (bc == Boundary::periodic) {
        e.rho[0] = rho[n - 1];
        e.m[0] = m[n - 1];
        e.rho[n + 1] = rho[0];
        e.m[n + 1] = m[0];
    } else {
        e.rho[0] = g.rho_l;
        e.m[0] = g.m_l;
        e.rho[n + 1] = g.rho_r;
        e.m[n + 1] = g.m_r;
    }
    return e;
}

void rhs(const std::vector<double>& rho, const std::vector<double>& m, const Ghosts& g,
         const SolverConfig& cfg, std::vector<double>& frho, std::vector<double>& fm) {
    const std::size_t n = rho.size();
    const Extended e = extend(rho, m, g, cfg.bc);
    std::vector<double> u(n + 2), flux(n + 2);
    for (std::size_t k = 0; k < n + 2; ++k) {
        if (!(e.rho[k] > 0.0)) throw StabilityError("step: nonpositive density in stage");
        u[k] = e.m[k] / e.rho[k];
        flux[k] = e.m[k] * u[k] + e.rho[k];
    }
    const double c1 = 1.0 / (2.0 * cfg.dx);
    const double c2 = cfg.eps / (cfg.dx * cfg.dx);
    const double e2 = cfg.eps2();
    frho.resize(n);
    fm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i + 1;
        const double ux = (u[k + 1] - u[k - 1]) * c1;
        frho[i] = -(e.m[k + 1] - e.m[k - 1]) * c1 + c2 * (e.rho[k + 1] - 2.0 * e.rho[k] + e.rho[k - 1]) +
                  2.0 * e2 * ux;
        fm[i] = -(flux[k + 1] - flux[k - 1]) * c1 + c2 * (e.m[k + 1] - 2.0 * e.m[k] + e.m[k - 1]) +
                e2 * (u[k + 1] * u[k + 1] - u[k - 1] * u[k - 1]) * c1 +
                2.0 * e2 * std::log(e.rho[k + 1] / e.rho[k - 1]) * c1;
    }
}

}  // namespace

GridState step(const GridState& s, const SolverConfig& cfg, std::optional<double> dt_opt) {
    const double dt = dt_opt.value_or(cfg.dt());
    const std::size_t n = s.rho.size();
    std::vector<double> fr, fm;
    rhs(s.rho, s.m, s.ghosts, cfg, fr, fm);
    GridState out;
    out.ghosts = s.ghosts;
    out.t = s.t + dt;
    out.rho.resize(n);
    out.m.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.rho[i] = s.rho[i] + dt * fr[i];
        out.m[i] = s.m[i] + dt * fm[i];
    }
    if (cfg.scheme == TimeScheme::heun) {
        std::vector<double> fr2, fm2;
        rhs(out.rho, out.m, s.ghosts, cfg, fr2, fm2);
        for (std::size_t i = 0; i < n; ++i) {
            out.rho[i] = 0.5 * (s.rho[i] + out.rho[i] + dt * fr2[i]);
            out.m[i] = 0.5 * (s.m[i] + out.m[i] + dt * fm2[i]);
        }
    }
    const double floor = 2.0 * cfg.eps2() * (1.0 - 1e-10);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(out.rho[i] >= floor) || !std::isfinite(out.m[i])) {
            std::ostringstream os;
            os.precision(17);
            os << "step: density " << out.rho[i] << " below the floor " << 2.0 * cfg.eps2()
               << " at cell " << i << ", t = " << out.t << "; reduce dt_factor (now "
               << cfg.dt_factor << ")";
            throw StabilityError(os.str());
        }
    }
    return out;
}

double dissipation_weight(double x, double R) {
    const double a = std::abs(x);
    if (a <= R) return 1.0;
    if (a >= 2.0 * R) return std::exp(-a);
    // cubic Hermite from (R, 1, 0) to (2R, e^{-2R}, -e^{-2R})
    const double t = (a - R) / R;
    const double y1 = std::exp(-2.0 * R);
    const double m1 = -y1 * R;
    const double h00 = 2 * t * t * t - 3 * t * t + 1;
    const double h01 = -2 * t * t * t + 3 * t * t;
    const double h11 = t * t * t - t * t;
    return h00 + h01 * y1 + h11 * m1;
}

namespace {

double dissipation_rate(const GridState& s, const SolverConfig& cfg, const Grid& g) {
    const Extended e = extend(s.rho, s.m, s.ghosts, cfg.bc);
    const std::size_t n = s.rho.size();
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i + 1;
        const double rx = (e.rho[k + 1] - e.rho[k - 1]) / (2.0 * cfg.dx);
        const double ux = (e.m[k + 1] / e.rho[k + 1] - e.m[k - 1] / e.rho[k - 1]) / (2.0 * cfg.dx);
        terms[i] = dissipation_weight(g.x(static_cast<int>(i)), cfg.weight_R) * cfg.eps *
                   (rx * rx / e.rho[k] + e.rho[k] * ux * ux);
    }
    return pairwise_sum(terms) * cfg.dx;
}

StepDiagnostics diagnose(const GridState& s, const Grid& g, double dt) {
    StepDiagnostics d;
    d.t = s.t;
    d.dt = dt;
    d.min_rho = std::numeric_limits<double>::infinity();
    d.max_w = -std::numeric_limits<double>::infinity();
    d.min_z = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        const double u = s.m[i] / s.rho[i];
        const double L = std::log(s.rho[i]);
        if (s.rho[i] < d.min_rho) {
            d.min_rho = s.rho[i];
            d.x_min_rho = g.x(static_cast<int>(i));
        }
        d.max_w = std::max(d.max_w, u + L);
        d.min_z = std::min(d.min_z, u - L);
    }
    return d;
}

}  // namespace

RunResult run(const InitialData& data, SolverConfig cfg, const RunOptions& opts) {
    cfg.finalize();
    RunResult res;
    res.grid = make_grid(cfg);
    if (static_cast<int>(data.rho0.size()) != res.grid.n)
        throw DomainError("run: initial data length does not match the grid");
    res.eps1 = cfg.eps1;
    res.eps2 = cfg.eps2();
    res.dissipation.weight_R = cfg.weight_R;

    std::vector<double> targets;
    for (double t : opts.output_times)
        if (t > 0.0 && t < cfg.t_final) targets.push_back(t);
    targets.push_back(cfg.t_final);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    GridState s = initial_state(data, cfg);
    res.steps.push_back(diagnose(s, res.grid, 0.0));
    res.trajectory.push_back(s);
    const double w0 = res.steps.front().max_w;
    const double z0 = res.steps.front().min_z;
    double rate_prev = dissipation_rate(s, cfg, res.grid);
    std::vector<double> dissipation_terms;

    const double dt_nominal = cfg.dt();
    for (double target : targets) {
        while (s.t < target) {
            double dt = dt_nominal;
            bool hits = false;
            if (dt >= (target - s.t) * (1.0 - 1e-12)) {
                dt = target - s.t;
                hits = true;
            }
            s = step(s, cfg, dt);
            if (hits) s.t = target;
            const StepDiagnostics d = diagnose(s, res.grid, dt);
            res.steps.push_back(d);
            if (d.max_w > w0 + cfg.invariant_tol || d.min_z < z0 - cfg.invariant_tol) {
                std::ostringstream os;
                os.precision(17);
                os << "run: invariant region left at t = " << d.t << " (max w " << d.max_w
                   << " vs " << w0 << ", min z " << d.min_z << " vs " << z0 << ")";
                throw StabilityError(os.str());
            }
            const double rate = dissipation_rate(s, cfg, res.grid);
            dissipation_terms.push_back(0.5 * (rate_prev + rate) * dt);
            rate_prev = rate;
            if (opts.store_every_step || (hits && s.t == target)) res.trajectory.push_back(s);
        }
    }
    res.dissipation.value = pairwise_sum(dissipation_terms);
    return res;
}

PositivityCertificate positivity_certificate(const RunResult& run) {
    if (run.steps.empty()) throw DomainError("positivity_certificate: empty trajectory");
    PositivityCertificate c;
    c.floor = 2.0 * run.eps2;
    c.margin = std::numeric_limits<double>::infinity();
    for (const auto& d : run.steps) {
        if (d.min_rho - c.floor < c.margin) {
            c.margin = d.min_rho - c.floor;
            c.t = d.t;
            c.x = d.x_min_rho;
        }
    }
    c.ok = c.margin >= -1e-10 * c.floor;
    return c;
}

InvariantReport invariant_report(const RunResult& run) {
    if (run.steps.empty()) throw DomainError("invariant_report: empty trajectory");
    InvariantReport r;
    r.w_max0 = run.steps.front().max_w;
    r.z_min0 = run.steps.front().min_z;
    for (const auto& d : run.steps) {
        r.w_drift = std::max(r.w_drift, d.max_w - r.w_max0);
        r.z_drift = std::max(r.z_drift, r.z_min0 - d.min_z);
    }
    return r;
}

double energy_identity_residual(const RunResult& run, const SolverConfig& cfg_in) {
    SolverConfig cfg = cfg_in;
    cfg.finalize();
    const auto& traj = run.trajectory;
    if (traj.size() != run.steps.size())
        throw PreconditionError("energy_identity_residual: trajectory must hold every step");
    const double eps = cfg.eps, e2 = cfg.eps2(), dx = cfg.dx;
    const std::size_t n = traj.front().rho.size();
    if (n < 4) throw DomainError("energy_identity_residual: grid too small");

    auto energy = [](double r, double u) { return 0.5 * r * u * u + 1.0 + r * std::log(r) - r; };
    std::vector<double> rows;
    rows.reserve(traj.size());
    std::vector<double> E0(n), E1(n), J(n - 1), D(n - 1), terms(n - 2);
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const GridState& a = traj[k];
        const GridState& b = traj[k + 1];
        const double dt = b.t - a.t;
        for (std::size_t i = 0; i < n; ++i) {
            E0[i] = energy(a.rho[i], a.m[i] / a.rho[i]);
            E1[i] = energy(b.rho[i], b.m[i] / b.rho[i]);
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double r = a.rho[i], u = a.m[i] / r, L = std::log(r);
            const double r1 = a.rho[i + 1], u1 = a.m[i + 1] / r1;
            const double rx = (r1 - r) / dx;
            const double ux = (u1 - u) / dx;
            const double kx = (0.5 * r1 * u1 * u1 - 0.5 * r * u * u) / dx;
            D[i] = eps * rx * rx / r + eps * r * ux * ux;
            J[i] = 0.5 * r * u * u * u + u * r * L - eps * rx * L - 2.0 * e2 * u * L - eps * kx -
                   e2 * u * u * u / 3.0;
        }
        for (std::size_t i = 0; i + 2 < n; ++i) {
            const double res = (E1[i] - E0[i]) / dt + D[i] + (J[i + 1] - J[i]) / dx;
            terms[i] = std::abs(res) * dissipation_weight(run.grid.x(static_cast<int>(i)), cfg.weight_R);
        }
        rows.push_back(pairwise_sum(terms) * dx * dt);
    }
    return pairwise_sum(rows);
}

}  // namespace isolab
