#include <doctest.h>

#include <cmath>

#include "isolab/errors.hpp"
#include "isolab/verifier.hpp"

using namespace isolab;

namespace {

SpaceTime constant_spacetime(double rho, double u, int n = 100, int nt = 20) {
    SpaceTime st;
    st.grid = {-1.0, 2.0 / n, n};
    for (int k = 0; k <= nt; ++k) {
        GridState s;
        s.t = 0.2 * k / nt;
        s.rho.assign(static_cast<std::size_t>(n), rho);
        s.m.assign(static_cast<std::size_t>(n), rho * u);
        st.states.push_back(s);
    }
    return st;
}

std::vector<TestFunction> battery() {
    return {make_test_function(-0.05, 0.3, 0.1, 0.08), make_test_function(0.05, 0.2, 0.12, 0.06),
            make_test_function(0.0, 0.5, 0.1, 0.09, 2.0), make_test_function(-0.1, 0.15, 0.08, 0.05),
            make_test_function(0.1, 0.25, 0.15, 0.04)};
}

const EntropyPair& shared_pair() {
    static const EntropyPair p =
        EntropyPair::tabulate(gaussian_generator(1.0), {0.18, 0.3, -0.35, 0.35}, 40, 40, {}, "g1");
    return p;
}

}  // namespace

TEST_CASE("test functions") {
    const auto tf = make_test_function(0.1, 0.3, 0.1, 0.05, 2.0);
    CHECK(tf.nonnegative);
    CHECK(tf.phi(0.1, 0.1) == doctest::Approx(2.0));
    CHECK(tf.phi(0.41, 0.1) == 0.0);
    const double h = 1e-6;
    for (double x : {-0.1, 0.05, 0.3}) {
        for (double t : {0.07, 0.1, 0.13}) {
            CHECK(tf.phi_x(x, t) ==
                  doctest::Approx((tf.phi(x + h, t) - tf.phi(x - h, t)) / (2 * h)).epsilon(1e-6));
            CHECK(tf.phi_t(x, t) ==
                  doctest::Approx((tf.phi(x, t + h) - tf.phi(x, t - h)) / (2 * h)).epsilon(1e-6));
        }
    }
    const auto st = constant_spacetime(0.2, 0.0);
    CHECK_NOTHROW(validate_support(tf, st));
    CHECK_THROWS_AS(validate_support(make_test_function(0.9, 0.2, 0.1, 0.05), st), DomainError);
    CHECK_THROWS_AS(validate_support(make_test_function(0.0, 0.2, 0.18, 0.05), st), DomainError);
    CHECK_FALSE(make_test_function(0.0, 0.2, 0.1, 0.05, -1.0).nonnegative);
}

TEST_CASE("tabulated pair matches direct evaluation") {
    const auto& p = shared_pair();
    CHECK(p.convexity_certificate() > 1.0);
    for (double r : {0.2, 0.23, 0.27}) {
        for (double u : {-0.3, 0.05, 0.3}) {
            CHECK(std::abs(p.eta(r, u) - p.exact_eta(r, u)) < 1e-6);
            CHECK(std::abs(p.q(r, u) - p.exact_q(r, u)) < 1e-6);
            // chain rule against finite differences of the direct evaluation in (rho, m)
            const double m = r * u, h = 1e-4 * r;
            auto e = [&](double rr, double mm) { return p.exact_eta(rr, mm / rr); };
            const auto c = to_conservative(p.eta_derivs(r, u), r, u);
            CHECK(c.rho == doctest::Approx((e(r + h, m) - e(r - h, m)) / (2 * h)).epsilon(1e-4));
            CHECK(c.m == doctest::Approx((e(r, m + h) - e(r, m - h)) / (2 * h)).epsilon(1e-4));
            const double h2 = 2e-3 * r;
            const double frr = (e(r + h2, m) - 2 * e(r, m) + e(r - h2, m)) / (h2 * h2);
            const double fmm = (e(r, m + h2) - 2 * e(r, m) + e(r, m - h2)) / (h2 * h2);
            const double frm = (e(r + h2, m + h2) - e(r + h2, m - h2) - e(r - h2, m + h2) +
                                e(r - h2, m - h2)) / (4 * h2 * h2);
            CHECK(c.rho_rho == doctest::Approx(frr).epsilon(5e-2));
            CHECK(c.m_m == doctest::Approx(fmm).epsilon(5e-2));
            CHECK(c.rho_m == doctest::Approx(frm).epsilon(5e-2).scale(std::abs(frr) + std::abs(fmm)));
        }
    }
    CHECK_THROWS_AS(p.eta(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(p.q(0.2, 1.0), DomainError);
    CHECK_THROWS_AS(EntropyPair::tabulate(gaussian_generator(1.0), {0.5, 0.999, -0.1, 0.1}), DomainError);
}

TEST_CASE("nonconvex pairs are refused") {
    auto bump = std::make_shared<const EntropyGenerator>(EntropyGenerator::from_function(
        [](double s) { return std::exp(-s * s / 2); }, -8, 8, 801));
    const auto p = EntropyPair::tabulate(bump, {0.18, 0.3, -0.35, 0.35}, 8, 8, {}, "positive bump");
    CHECK(p.convexity_certificate() < -1e-8);
    CHECK_THROWS_AS(p.require_convex(), PreconditionError);
    const auto st = constant_spacetime(0.2, 0.0);
    CHECK_THROWS_AS(entropy_inequality_residual(st, p, make_test_function(0, 0.2, 0.1, 0.05)),
                    PreconditionError);
    CHECK_THROWS_AS(entropy_inequality_residual(st, shared_pair(), make_test_function(0, 0.2, 0.1, 0.05, -1)),
                    PreconditionError);
}

TEST_CASE("constant states have vanishing residuals") {
    const auto st = constant_spacetime(0.22, 0.1);
    for (const auto& phi : battery()) {
        const auto c = conservation_residual(st, phi);
        CHECK(std::abs(c.mass) < 1e-15);
        CHECK(std::abs(c.momentum) < 1e-15);
        CHECK(std::abs(entropy_inequality_residual(st, shared_pair(), phi)) < 1e-15);
    }
    SolverConfig cfg;
    const auto th = theta_diagnostic(st, shared_pair(), cfg);
    CHECK(th.eps_eta_x_L2 == 0.0);
    CHECK(th.quadratic_L1 == 0.0);
    CHECK(th.eps1_terms_L2 == 0.0);
    const SpaceTime single{st.grid, {st.states.front()}};
    CHECK_THROWS_AS(theta_diagnostic(single, shared_pair(), cfg), PreconditionError);
}

TEST_CASE("sampled exact solutions satisfy the weak form under refinement") {
    const auto fan = solve_riemann({0.2, 0.3, 0.2, -0.3});
    const auto phis = battery();
    double prev = INFINITY;
    // shock placement relative to the cells makes single doublings noisy; refine by 4
    for (int n : {100, 400, 1600}) {
        const auto st = sample_exact(fan, {-1.0, 2.0 / n, n}, 0.2, n / 2);
        double worst = 0.0;
        for (const auto& phi : phis) {
            const auto c = conservation_residual(st, phi);
            worst = std::max({worst, std::abs(c.mass), std::abs(c.momentum)});
        }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 2e-6);
}

TEST_CASE("smooth exact solutions give entropy equality in the limit") {
    const auto fan = solve_riemann({0.25, -0.05, 0.22, 0.1});
    REQUIRE(fan.wave1.type == WaveType::rarefaction);
    REQUIRE(fan.wave2.type == WaveType::rarefaction);
    const auto pair = EntropyPair::tabulate(gaussian_generator(1.0), {0.18, 0.3, -0.35, 0.35});
    const auto phi = make_test_function(0.0, 0.5, 0.1, 0.08);
    double prev = INFINITY;
    for (int n : {100, 200, 400}) {
        const auto st = sample_exact(fan, {-1.0, 2.0 / n, n}, 0.2, n / 2);
        const double r = std::abs(entropy_inequality_residual(st, pair, phi));
        CHECK(r < prev);
        const auto c = conservation_residual(st, phi);
        CHECK(std::abs(c.mass) < 1e-4 * 100.0 / n);
        CHECK(std::abs(c.momentum) < 1e-4 * 100.0 / n);
        prev = r;
    }
    CHECK(prev < 2e-5);
}

TEST_CASE("shocks produce entropy at the predicted rate") {
    const auto fan = solve_riemann({0.2, 0.3, 0.2, -0.3});
    const auto phis = battery();
    const auto st = sample_exact(fan, {-1.0, 2.0 / 800, 800}, 0.2, 400);
    const auto res = entropy_inequality_residuals(st, shared_pair(), phis);
    for (std::size_t k = 0; k < phis.size(); ++k) {
        const double oracle = shock_entropy_production(fan, shared_pair(), phis[k]);
        CHECK(oracle > 0.0);
        CHECK(res[k] > 0.0);
        CHECK(res[k] == doctest::Approx(oracle).epsilon(0.1));
    }
}

TEST_CASE("theta decomposition over an eps sweep") {
    // stationary 2-shock, generators centred on the mean velocity
    const double rr = 0.2, rl = 0.35, ur = -std::sqrt(rl / rr);
    const double ul = ur + (rl - rr) / std::sqrt(rl * rr);
    const auto fan = solve_riemann({rl, ul, rr, ur});
    REQUIRE(std::abs(fan.wave2.speed_lo) < 1e-12);
    std::vector<ThetaReport> reps;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        SolverConfig c;
        c.eps = eps;
        c.dx = 1.0 / 800;
        c.t_final = 0.6;
        c.bc = Boundary::constant_extension;
        RunOptions o;
        for (int k = 1; k < 200; ++k) o.output_times.push_back(0.6 * k / 200);
        const auto r = run(step_initial_data(make_grid(c.finalize()), rl, ul, rr, ur), c, o);
        const auto st = SpaceTime::from_run(r);
        const auto pair = EntropyPair::tabulate(gaussian_generator(1.0, 801, -1.0),
                                                EntropyPair::realized_box(st));
        pair.require_convex();
        reps.push_back(theta_diagnostic(st, pair, c, 0.3, 0.6));
    }
    for (std::size_t k = 0; k + 1 < reps.size(); ++k) {
        CHECK(reps[k].eps_eta_x_L2 / reps[k + 1].eps_eta_x_L2 >= 0.95 * std::sqrt(2.0));
        CHECK(reps[k + 1].eps1_terms_L2 < reps[k].eps1_terms_L2);
    }
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : reps) {
        lo = std::min(lo, r.quadratic_L1);
        hi = std::max(hi, r.quadratic_L1);
    }
    CHECK((hi - lo) / hi < 0.15);
}

TEST_CASE("strong convergence diagnostic") {
    const auto a = constant_spacetime(0.3, 0.1);
    const auto rep0 = strong_convergence_diagnostic({a, a, a});
    for (const auto& row : rep0.distances)
        for (double d : row) CHECK(d == 0.0);
    CHECK(rep0.cauchy);
    CHECK_THROWS_AS(strong_convergence_diagnostic({a}), DomainError);
    CHECK_THROWS_AS(strong_convergence_diagnostic({a, constant_spacetime(0.3, 0.1, 50)}), DomainError);

    std::vector<SpaceTime> finals;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        SolverConfig c;
        c.eps = eps;
        c.dx = 1.0 / 400;
        c.t_final = 0.2;
        c.bc = Boundary::constant_extension;
        const auto r = run(step_initial_data(make_grid(c.finalize()), 0.05, 0.5, 0.2, -0.4), c);
        finals.push_back({r.grid, {r.trajectory.back()}});
    }
    const auto rep = strong_convergence_diagnostic(finals);
    CHECK(rep.names.size() == 5);
    CHECK(rep.cauchy);
}
