#include "isolab/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "isolab/errors.hpp"
#include "isolab/quadrature.hpp"
#include "kernel_detail.hpp"

namespace isolab {

void SpaceTime::validate() const {
    if (states.empty()) throw DomainError("SpaceTime: no states");
    if (grid.n < 3) throw DomainError("SpaceTime: grid needs at least 3 cells");
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (static_cast<int>(states[k].rho.size()) != grid.n ||
            static_cast<int>(states[k].m.size()) != grid.n)
            throw DomainError("SpaceTime: state size does not match the grid");
        if (k > 0 && !(states[k].t > states[k - 1].t))
            throw DomainError("SpaceTime: times must increase");
    }
}

SpaceTime SpaceTime::from_run(const RunResult& run) {
    SpaceTime st{run.grid, run.trajectory};
    st.validate();
    return st;
}

SpaceTime sample_exact(const WaveFan& fan, const Grid& grid, double t_final, int nt, double x0) {
    if (nt < 1 || !(t_final > 0.0)) throw DomainError("sample_exact: need nt >= 1 and t_final > 0");
    SpaceTime st;
    st.grid = grid;
    const auto n = static_cast<std::size_t>(grid.n);
    for (int k = 0; k <= nt; ++k) {
        GridState s;
        s.t = t_final * k / nt;
        s.rho.resize(n);
        s.m.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(static_cast<int>(i));
            FanSample v;
            if (k == 0)
                v = x < x0 ? FanSample{fan.data.rho_l, fan.data.u_l}
                           : FanSample{fan.data.rho_r, fan.data.u_r};
            else
                v = sample_fan(fan, (x - x0) / s.t);
            s.rho[i] = v.rho;
            s.m[i] = v.rho * v.u;
        }
        st.states.push_back(std::move(s));
    }
    return st;
}

namespace {

double bump(double y) { return std::abs(y) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - y * y)) : 0.0; }

double bump_prime(double y) {
    if (!(std::abs(y) < 1.0)) return 0.0;
    const double d = 1.0 - y * y;
    return bump(y) * (-2.0 * y / (d * d));
}

}  // namespace

TestFunction make_test_function(double xc, double hx, double tc, double ht, double amplitude) {
    if (!(hx > 0.0) || !(ht > 0.0)) throw DomainError("make_test_function: widths must be positive");
    TestFunction tf;
    tf.phi = [=](double x, double t) { return amplitude * bump((x - xc) / hx) * bump((t - tc) / ht); };
    tf.phi_x = [=](double x, double t) {
        return amplitude * bump_prime((x - xc) / hx) / hx * bump((t - tc) / ht);
    };
    tf.phi_t = [=](double x, double t) {
        return amplitude * bump((x - xc) / hx) * bump_prime((t - tc) / ht) / ht;
    };
    tf.x_lo = xc - hx;
    tf.x_hi = xc + hx;
    tf.t_lo = tc - ht;
    tf.t_hi = tc + ht;
    tf.nonnegative = amplitude >= 0.0;
    return tf;
}

void validate_support(const TestFunction& phi, const SpaceTime& st) {
    const double a = st.grid.x_min;
    const double b = st.grid.x_min + st.grid.n * st.grid.dx;
    if (!(phi.x_lo > a) || !(phi.x_hi < b) || !(phi.x_lo < phi.x_hi)) {
        std::ostringstream os;
        os << "test function support [" << phi.x_lo << ", " << phi.x_hi
           << "] is not strictly inside the domain [" << a << ", " << b << "]";
        throw DomainError(os.str());
    }
    if (!(phi.t_hi < st.states.back().t) || !(phi.t_hi > 0.0)) {
        std::ostringstream os;
        os << "test function time support ends at " << phi.t_hi << ", outside (0, "
           << st.states.back().t << ")";
        throw DomainError(os.str());
    }
}

ConservativeDerivs to_conservative(const EntropyDerivs& d, double rho, double u) {
    ConservativeDerivs c;
    const double r2 = rho * rho;
    c.rho = (d.R - u * d.u) / rho;
    c.m = d.u / rho;
    c.m_m = d.uu / r2;
    c.rho_m = (d.Ru - u * d.uu - d.u) / r2;
    c.rho_rho = (d.RR - 2.0 * u * d.Ru + u * u * d.uu + 2.0 * u * d.u - d.R) / r2;
    return c;
}

namespace {

// bicubic convolution weights for nodes i-1 .. i+2 and their first two derivatives in t
struct Weights {
    std::array<double, 4> w, d1, d2;
};

Weights keys(double t) {
    const double t2 = t * t, t3 = t2 * t;
    return {{0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
             0.5 * (t3 - t2)},
            {0.5 * (-3 * t2 + 4 * t - 1), 0.5 * (9 * t2 - 10 * t), 0.5 * (-9 * t2 + 8 * t + 1),
             0.5 * (3 * t2 - 2 * t)},
            {0.5 * (-6 * t + 4), 0.5 * (18 * t - 10), 0.5 * (-18 * t + 8), 0.5 * (6 * t - 2)}};
}

double min_eigenvalue(double a, double b, double c) {
    const double tr = 0.5 * (a + c);
    const double dif = 0.5 * (a - c);
    return tr - std::sqrt(dif * dif + b * b);
}

}  // namespace

std::shared_ptr<const EntropyGenerator> gaussian_generator(double sigma, int samples,
                                                           double center) {
    if (!(sigma > 0.0) || !std::isfinite(center))
        throw DomainError("gaussian_generator: sigma must be positive and the center finite");
    return std::make_shared<const EntropyGenerator>(EntropyGenerator::from_function(
        [sigma, center](double s) {
            const double d = s - center;
            return -std::exp(-d * d / (2.0 * sigma * sigma));
        },
        center - 8.0 * sigma, center + 8.0 * sigma, samples));
}

EntropyPair::Box EntropyPair::realized_box(const SpaceTime& st, double pad) {
    st.validate();
    double rlo = std::numeric_limits<double>::infinity(), rhi = -rlo, ulo = rlo, uhi = -rlo;
    for (const auto& s : st.states) {
        for (std::size_t i = 0; i < s.rho.size(); ++i) {
            if (!(s.rho[i] > 0.0)) throw DomainError("realized_box: nonpositive density");
            const double u = s.m[i] / s.rho[i];
            rlo = std::min(rlo, s.rho[i]);
            rhi = std::max(rhi, s.rho[i]);
            ulo = std::min(ulo, u);
            uhi = std::max(uhi, u);
        }
    }
    return {rlo * std::exp(-pad), rhi * std::exp(pad), ulo - pad, uhi + pad};
}

EntropyPair EntropyPair::tabulate(std::shared_ptr<const EntropyGenerator> gen, Box box, int nR,
                                  int nu, const KernelConfig& cfg, std::string name) {
    if (!gen) throw DomainError("EntropyPair: missing generator");
    cfg.validate();
    if (nR < 4 || nu < 4) throw DomainError("EntropyPair: need at least 4 nodes per direction");
    if (!(box.rho_lo > 0.0) || !(box.rho_hi > box.rho_lo) || !(box.u_hi > box.u_lo))
        throw DomainError("EntropyPair: empty or invalid box");
    EntropyPair p;
    p.gen_ = std::move(gen);
    p.cfg_ = cfg;
    p.box_ = box;
    p.name_ = std::move(name);
    p.nR_ = nR;
    p.nu_ = nu;
    p.R0_ = std::log(box.rho_lo);
    p.hR_ = (std::log(box.rho_hi) - p.R0_) / (nR - 1);
    p.u0_ = box.u_lo;
    p.hu_ = (box.u_hi - box.u_lo) / (nu - 1);
    if (p.R0_ + p.hR_ * nR > 0.0)
        throw DomainError("EntropyPair: the table must stay inside rho < 1");

    const EntropyGenerator& g = *p.gen_;
    const int NR = nR + 2, NU = nu + 2;
    p.eta_.assign(static_cast<std::size_t>(NR * NU), 0.0);
    p.q_.assign(static_cast<std::size_t>(NR * NU), 0.0);
    const Fn1 one = [](double) { return 1.0; };
    constexpr int K = 96;
    for (int I = 0; I < NR; ++I) {
        const double R = p.R0_ + p.hR_ * (I - 1);
        const double a = std::abs(R);
        // h(R, .) is odd in v; spline its right half once per row
        std::vector<double> hs(K + 1);
        for (int k = 0; k <= K; ++k) hs[static_cast<std::size_t>(k)] = detail::h_inner(R, a * k / K, cfg);
        const boost::math::interpolators::cardinal_cubic_b_spline<double> half(hs.begin(), hs.end(),
                                                                             0.0, a / K);
        const Fn1 hrow = [&](double v) { return v >= 0.0 ? half(std::min(v, a)) : -half(std::min(-v, a)); };
        for (int J = 0; J < NU; ++J) {
            const double u = p.u0_ + p.hu_ * (J - 1);
            const double outer = -g.integrate(one, g.s_min(), u - a) + g.integrate(one, u + a, g.s_max());
            const double eta = entropy_eta(g, R, u, cfg);
            const double inner = g.integrate([&](double s) { return hrow(u - s); }, u - a, u + a, {u});
            const auto idx = static_cast<std::size_t>(I * NU + J);
            p.eta_[idx] = eta;
            p.q_[idx] = u * eta + inner + outer;
        }
    }

    double cert = std::numeric_limits<double>::infinity();
    constexpr int probes = 9;
    for (int a = 0; a < probes; ++a) {
        const double rho = box.rho_lo * std::pow(box.rho_hi / box.rho_lo, a / double(probes - 1));
        for (int b = 0; b < probes; ++b) {
            const double u = box.u_lo + (box.u_hi - box.u_lo) * b / (probes - 1);
            const double m = rho * u, h = 1e-3 * rho;
            auto e = [&](double r, double mm) { return p.exact_eta(r, mm / r); };
            const double e0 = e(rho, m);
            const double frr = (e(rho + h, m) - 2 * e0 + e(rho - h, m)) / (h * h);
            const double fmm = (e(rho, m + h) - 2 * e0 + e(rho, m - h)) / (h * h);
            const double frm =
                (e(rho + h, m + h) - e(rho + h, m - h) - e(rho - h, m + h) + e(rho - h, m - h)) /
                (4 * h * h);
            cert = std::min(cert, min_eigenvalue(frr, frm, fmm));
        }
    }
    p.certificate_ = cert;
    return p;
}

void EntropyPair::require_convex(double threshold) const {
    if (!(certificate_ >= threshold)) {
        std::ostringstream os;
        os.precision(17);
        os << "entropy pair '" << name_ << "' is not convex on its box: certificate " << certificate_;
        throw PreconditionError(os.str());
    }
}

void EntropyPair::locate(double rho, double u, int& i, int& j, double& tR, double& tu) const {
    if (!(rho > 0.0) || !std::isfinite(u)) throw DomainError("EntropyPair: invalid state");
    const double x = (std::log(rho) - R0_) / hR_;
    const double y = (u - u0_) / hu_;
    const double slack = 1e-9;
    if (x < -slack || x > nR_ - 1 + slack || y < -slack || y > nu_ - 1 + slack) {
        std::ostringstream os;
        os << "EntropyPair: state (rho " << rho << ", u " << u << ") outside the table box";
        throw DomainError(os.str());
    }
    i = std::clamp(static_cast<int>(std::floor(x)), 0, nR_ - 2);
    j = std::clamp(static_cast<int>(std::floor(y)), 0, nu_ - 2);
    tR = x - i;
    tu = y - j;
}

double EntropyPair::eta(double rho, double u) const { return eta_derivs(rho, u).eta; }

double EntropyPair::q(double rho, double u) const {
    int i, j;
    double tR, tu;
    locate(rho, u, i, j, tR, tu);
    const Weights a = keys(tR), b = keys(tu);
    const int NU = nu_ + 2;
    double v = 0.0;
    for (int di = 0; di < 4; ++di)
        for (int dj = 0; dj < 4; ++dj)
            v += a.w[di] * b.w[dj] * q_[static_cast<std::size_t>((i + di) * NU + j + dj)];
    return v;
}

EntropyDerivs EntropyPair::eta_derivs(double rho, double u) const {
    int i, j;
    double tR, tu;
    locate(rho, u, i, j, tR, tu);
    const Weights a = keys(tR), b = keys(tu);
    const int NU = nu_ + 2;
    EntropyDerivs d;
    for (int di = 0; di < 4; ++di) {
        for (int dj = 0; dj < 4; ++dj) {
            const double v = eta_[static_cast<std::size_t>((i + di) * NU + j + dj)];
            d.eta += a.w[di] * b.w[dj] * v;
            d.R += a.d1[di] * b.w[dj] * v;
            d.u += a.w[di] * b.d1[dj] * v;
            d.RR += a.d2[di] * b.w[dj] * v;
            d.Ru += a.d1[di] * b.d1[dj] * v;
            d.uu += a.w[di] * b.d2[dj] * v;
        }
    }
    d.R /= hR_;
    d.u /= hu_;
    d.RR /= hR_ * hR_;
    d.Ru /= hR_ * hu_;
    d.uu /= hu_ * hu_;
    return d;
}

double EntropyPair::exact_eta(double rho, double u) const {
    return entropy_eta(*gen_, std::log(rho), u, cfg_);
}

double EntropyPair::exact_q(double rho, double u) const {
    return entropy_flux_q(*gen_, std::log(rho), u, cfg_);
}

namespace {

std::vector<double> time_weights(const SpaceTime& st) {
    std::vector<double> t;
    t.reserve(st.states.size());
    for (const auto& s : st.states) t.push_back(s.t);
    if (t.size() == 1) return {0.0};
    return trapezoid_weights(t);
}

// cells whose centres fall inside [lo, hi]
std::pair<int, int> cell_range(const Grid& g, double lo, double hi) {
    const int a = std::max(0, static_cast<int>(std::floor((lo - g.x_min) / g.dx - 0.5)));
    const int b = std::min(g.n - 1, static_cast<int>(std::ceil((hi - g.x_min) / g.dx - 0.5)));
    return {a, b};
}

}  // namespace

ConservationResidual conservation_residual(const SpaceTime& st, const TestFunction& phi) {
    st.validate();
    validate_support(phi, st);
    const auto w = time_weights(st);
    const auto [a, b] = cell_range(st.grid, phi.x_lo, phi.x_hi);
    std::vector<double> mass, mom;
    for (std::size_t k = 0; k < st.states.size(); ++k) {
        const GridState& s = st.states[k];
        if (s.t > phi.t_hi || s.t < phi.t_lo) continue;
        for (int i = a; i <= b; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double x = st.grid.x(i);
            const double ft = phi.phi_t(x, s.t), fx = phi.phi_x(x, s.t);
            const double flux = s.m[ii] * s.m[ii] / s.rho[ii] + s.rho[ii];
            mass.push_back(w[k] * (s.rho[ii] * ft + s.m[ii] * fx));
            mom.push_back(w[k] * (s.m[ii] * ft + flux * fx));
        }
    }
    const GridState& s0 = st.states.front();
    for (int i = a; i <= b; ++i) {
        const double f0 = phi.phi(st.grid.x(i), s0.t);
        mass.push_back(s0.rho[static_cast<std::size_t>(i)] * f0);
        mom.push_back(s0.m[static_cast<std::size_t>(i)] * f0);
    }
    return {pairwise_sum(mass) * st.grid.dx, pairwise_sum(mom) * st.grid.dx};
}

std::vector<double> entropy_inequality_residuals(const SpaceTime& st, const EntropyPair& pair,
                                                 const std::vector<TestFunction>& phis) {
    st.validate();
    pair.require_convex();
    if (phis.empty()) return {};
    double xlo = INFINITY, xhi = -INFINITY, tlo = INFINITY, thi = -INFINITY;
    for (const auto& phi : phis) {
        validate_support(phi, st);
        if (!phi.nonnegative) throw PreconditionError("entropy inequality needs a nonnegative test function");
        xlo = std::min(xlo, phi.x_lo);
        xhi = std::max(xhi, phi.x_hi);
        tlo = std::min(tlo, phi.t_lo);
        thi = std::max(thi, phi.t_hi);
    }
    const auto w = time_weights(st);
    const auto [a, b] = cell_range(st.grid, xlo, xhi);
    std::vector<std::vector<double>> terms(phis.size());
    std::vector<double> eta(static_cast<std::size_t>(b - a + 1)), q(eta.size());
    auto fill = [&](const GridState& s) {
        for (int i = a; i <= b; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double u = s.m[ii] / s.rho[ii];
            eta[static_cast<std::size_t>(i - a)] = pair.eta(s.rho[ii], u);
            q[static_cast<std::size_t>(i - a)] = pair.q(s.rho[ii], u);
        }
    };
    for (std::size_t k = 0; k < st.states.size(); ++k) {
        const GridState& s = st.states[k];
        const bool first = k == 0;
        if (!first && (s.t > thi || s.t < tlo)) continue;
        fill(s);
        for (std::size_t p = 0; p < phis.size(); ++p) {
            const TestFunction& phi = phis[p];
            if (s.t > phi.t_hi || s.t < phi.t_lo) continue;
            for (int i = a; i <= b; ++i) {
                const double x = st.grid.x(i);
                if (x < phi.x_lo || x > phi.x_hi) continue;
                const auto c = static_cast<std::size_t>(i - a);
                double v = w[k] * (eta[c] * phi.phi_t(x, s.t) + q[c] * phi.phi_x(x, s.t));
                if (first) v += eta[c] * phi.phi(x, s.t);
                terms[p].push_back(v);
            }
        }
    }
    std::vector<double> out;
    for (const auto& t : terms) out.push_back(pairwise_sum(t) * st.grid.dx);
    return out;
}

double entropy_inequality_residual(const SpaceTime& st, const EntropyPair& pair,
                                   const TestFunction& phi) {
    return entropy_inequality_residuals(st, pair, {phi}).front();
}

double shock_entropy_production(const WaveFan& fan, const EntropyPair& pair,
                                const TestFunction& phi, double x0) {
    const RiemannData& d = fan.data;
    struct Jump {
        double rl, ul, rr, ur, s;
    };
    std::vector<Jump> jumps;
    if (fan.wave1.type == WaveType::shock)
        jumps.push_back({d.rho_l, d.u_l, fan.rho_m, fan.u_m, fan.wave1.speed_lo});
    if (fan.wave2.type == WaveType::shock)
        jumps.push_back({fan.rho_m, fan.u_m, d.rho_r, d.u_r, fan.wave2.speed_lo});
    double total = 0.0;
    const double t0 = std::max(0.0, phi.t_lo);
    if (!(phi.t_hi > t0)) return 0.0;
    for (const Jump& j : jumps) {
        const double production = j.s * (pair.exact_eta(j.rr, j.ur) - pair.exact_eta(j.rl, j.ul)) -
                                  (pair.exact_q(j.rr, j.ur) - pair.exact_q(j.rl, j.ul));
        total += production *
                 adaptive_simpson([&](double t) { return phi.phi(x0 + j.s * t, t); }, t0, phi.t_hi, 1e-14);
    }
    return total;
}

ThetaReport theta_diagnostic(const SpaceTime& st, const EntropyPair& pair, const SolverConfig& cfg_in,
                             double t_lo, double t_hi) {
    st.validate();
    if (st.states.size() < 2)
        throw PreconditionError("theta_diagnostic: needs at least two time levels");
    SolverConfig cfg = cfg_in;
    cfg.finalize();
    const double eps = cfg.eps, e2 = cfg.eps2(), dx = st.grid.dx;
    if (!(t_hi > t_lo)) throw DomainError("theta_diagnostic: empty time window");
    std::vector<std::size_t> levels;
    std::vector<double> times;
    for (std::size_t k = 0; k < st.states.size(); ++k) {
        if (st.states[k].t >= t_lo && st.states[k].t <= t_hi) {
            levels.push_back(k);
            times.push_back(st.states[k].t);
        }
    }
    if (levels.size() < 2) throw PreconditionError("theta_diagnostic: fewer than two time levels in the window");
    const auto w = trapezoid_weights(times);
    const int n = st.grid.n;
    std::vector<double> a2, quad, b2, eta(static_cast<std::size_t>(n));
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const GridState& s = st.states[levels[l]];
        for (int i = 0; i < n; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            eta[ii] = pair.eta(s.rho[ii], s.m[ii] / s.rho[ii]);
        }
        double sa = 0.0, sq = 0.0, sb = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double rho = s.rho[ii], u = s.m[ii] / rho;
            const double rx = (s.rho[ii + 1] - s.rho[ii - 1]) / (2 * dx);
            const double mx = (s.m[ii + 1] - s.m[ii - 1]) / (2 * dx);
            const double ux = (s.m[ii + 1] / s.rho[ii + 1] - s.m[ii - 1] / s.rho[ii - 1]) / (2 * dx);
            const double ex = (eta[ii + 1] - eta[ii - 1]) / (2 * dx);
            const ConservativeDerivs c = to_conservative(pair.eta_derivs(rho, u), rho, u);
            const double qm = 2.0 * u * c.m + c.rho;
            const double e1 = e2 * ux * (qm + c.rho) - 2.0 * e2 * rx * c.m / rho;
            sa += (eps * ex) * (eps * ex);
            sq += std::abs(eps * (c.rho_rho * rx * rx + c.m_m * mx * mx + 2.0 * c.rho_m * rx * mx));
            sb += e1 * e1;
        }
        a2.push_back(w[l] * sa * dx);
        quad.push_back(w[l] * sq * dx);
        b2.push_back(w[l] * sb * dx);
    }
    return {std::sqrt(pairwise_sum(a2)), pairwise_sum(quad), std::sqrt(pairwise_sum(b2))};
}

StrongConvergenceReport strong_convergence_diagnostic(const std::vector<SpaceTime>& runs) {
    if (runs.size() < 2) throw DomainError("strong_convergence_diagnostic: need at least two runs");
    for (const auto& r : runs) {
        r.validate();
        if (r.grid.n != runs.front().grid.n || r.grid.dx != runs.front().grid.dx ||
            r.grid.x_min != runs.front().grid.x_min)
            throw DomainError("strong_convergence_diagnostic: runs are on different grids");
    }
    using F = double (*)(double, double);
    const std::vector<std::pair<std::string, F>> battery{
        {"rho", [](double r, double) { return r; }},
        {"m", [](double r, double u) { return r * u; }},
        {"m2_over_rho", [](double r, double u) { return r * u * u; }},
        {"W", [](double r, double u) { return r * std::exp(u); }},
        {"Z", [](double r, double u) { return r * std::exp(-u); }},
    };
    StrongConvergenceReport rep;
    rep.cauchy = true;
    const double dx = runs.front().grid.dx;
    for (const auto& [name, f] : battery) {
        rep.names.push_back(name);
        std::vector<double> row;
        for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
            const GridState& a = runs[k].states.back();
            const GridState& b = runs[k + 1].states.back();
            std::vector<double> t(a.rho.size());
            for (std::size_t i = 0; i < t.size(); ++i)
                t[i] = std::abs(f(a.rho[i], a.m[i] / a.rho[i]) - f(b.rho[i], b.m[i] / b.rho[i]));
            row.push_back(pairwise_sum(t) * dx);
            if (row.size() > 1 && row[row.size() - 1] > row[row.size() - 2]) rep.cauchy = false;
        }
        rep.distances.push_back(std::move(row));
    }
    return rep;
}

}  // namespace isolab
