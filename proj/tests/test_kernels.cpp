#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"
#include "support/oracles.hpp"

using namespace isolab;

namespace {
const KernelConfig cfg{};
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("series f: values at the origin") {
    CHECK(eval_f(0.0) == 1.0);
    const FDerivs d = eval_f_derivs(0.0);
    CHECK(d.f1 == -1.0 / 16.0);
    CHECK(std::abs(0.0 * d.f2 + d.f1 + d.f / 16.0) == 0.0);
}

TEST_CASE("series f: modified Bessel branch at m = -1") {
    const double v = eval_f(-1.0);
    CHECK(rel(v, oracle::f(-1.0)) < 1e-15);
    CHECK(rel(v, std::cyl_bessel_i(0.0, 0.5)) < 1e-15);
    CHECK(v == doctest::Approx(1.0634833707413236).epsilon(1e-15));
}

TEST_CASE("series f: Bessel J0 branch for positive m") {
    for (double y : {1.0, 2.0, 5.0}) {
        CHECK(rel(eval_f(y * y), std::cyl_bessel_j(0.0, 2.0 * 0.25 * y)) < 1e-14);
    }
}

TEST_CASE("series derivatives solve the ODE") {
    for (double m : {-25.0, -1.0, 1.0, 25.0}) {
        const FDerivs d = eval_f_derivs(m, cfg);
        CHECK(std::abs(m * d.f2 + d.f1 + d.f / 16.0) <= 10 * cfg.tail_tol);
        CHECK(rel(d.f1, oracle::f(m, 1)) < 1e-13);
        CHECK(rel(d.f2, oracle::f(m, 2)) < 1e-13);
    }
}

TEST_CASE("series f: errors") {
    CHECK_THROWS_AS(eval_f(std::nan("")), DomainError);
    CHECK_THROWS_AS(eval_f(INFINITY), DomainError);
    KernelConfig tight = cfg;
    tight.max_terms = 4;
    try {
        eval_f(-1000.0, tight);
        FAIL("expected PrecisionError");
    } catch (const PrecisionError& e) {
        CHECK(e.last_term() > tight.tail_tol);
    }
    KernelConfig bad = cfg;
    bad.A2 = 0.06;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("chi: support, value and boundary convention") {
    CHECK(eval_chi({-1.0, 2.0, 0.0}) == 0.0);
    CHECK(rel(eval_chi({-1.0, 0.0, 0.0}), std::exp(-0.5) * oracle::f(-1.0)) < 1e-15);
    CHECK(eval_chi({-1.0, 1.0, 0.0}) == 0.0);
    CHECK(eval_chi({-1.0, 0.7, 1.7}) == 0.0);
    for (double delta : {1e-4, 1e-6, 1e-8}) {
        const double v = eval_chi({-1.0, 1.0 - delta, 0.0});
        // slope of the interior formula is 2|R| e^{R/2} |f'(0)|
        CHECK(std::abs(v - std::exp(-0.5)) < 0.1 * delta + 1e-15);
    }
}

TEST_CASE("chi: nonnegative on the support") {
    for (double R : {-0.3, -1.0, -4.0})
        for (double v = -4.0; v <= 4.0; v += 0.05) CHECK(eval_chi({R, v, 0.0}) >= 0.0);
    for (double m = -100.0; m <= 0.0; m += 0.5) CHECK(eval_f(m) >= 1.0);
}

TEST_CASE("chi: vacuum decay follows the Bessel asymptotics") {
    for (double R : {-25.0, -100.0}) {
        const double v = eval_chi({R, 0.0, 0.0});
        const double asym = 1.0 / std::sqrt(std::numbers::pi * std::abs(R));
        CHECK(v <= 2.0 * asym);
        CHECK(v >= 0.5 * asym);
    }
}

TEST_CASE("H: exterior, s = u, and derivative in s") {
    CHECK(eval_H({-1.0, 3.0, 0.5}) == 2.5);
    CHECK(eval_H({-1.0, 0.0, -1.0}) == 1.0);
    const double ref = oracle::gk([](double r) { return std::exp(r / 2) * oracle::f(-r * r); }, -1, 0);
    CHECK(std::abs(eval_H({-1.0, 0.2, 0.2}) - ref) < 1e-12);
    for (double s : {-0.6, -0.2, 0.35, 0.8}) {
        const double step = 1e-4;
        const double d =
            (eval_H({-1.0, 0.1, s + step}) - eval_H({-1.0, 0.1, s - step})) / (2 * step);
        CHECK(std::abs(d - eval_h({-1.0, 0.1, s})) < 1e-7);
    }
    CHECK_THROWS_AS(eval_H({0.5, 0.0, 0.0}), DomainError);
}

TEST_CASE("h: exterior, oddness, brute-force oracle") {
    CHECK(eval_h({-1.0, 2.0, 0.0}) == -1.0);
    CHECK(eval_h({-1.0, -2.0, 0.0}) == 1.0);
    for (double v : {0.1, 0.5, 0.9}) CHECK(eval_h({-1.0, v, 0.0}) == -eval_h({-1.0, -v, 0.0}));
    // R = -1, u - s = 0.5 with a 10^6-point midpoint rule for the integral term
    const double I = oracle::midpoint(
        [](long double r) {
            return std::exp(r / 2) * oracle::f_series(0.25L - r * r, 1);
        },
        -1.0L, -0.5L, 1000000);
    const double ref = (std::exp(-0.25) - 1.0) - 2 * 0.5 * I;
    CHECK(std::abs(eval_h({-1.0, 0.5, 0.0}) - ref) < 1e-12);
    CHECK_THROWS_AS(eval_h({-1.0, 0.3, 0.3}), DomainError);
}

TEST_CASE("sigma") {
    CHECK(eval_sigma({-1.0, 0.0, 0.4}) == eval_h({-1.0, 0.0, 0.4}));
    CHECK(eval_sigma({-1.0, 2.0, 0.5}) == -1.0);
    const double ref = 0.3 * oracle::chi(-1.0, 0.3) + oracle::h(-1.0, 0.3);
    CHECK(std::abs(eval_sigma({-1.0, 0.3, 0.0}) - ref) < 1e-12);
}

TEST_CASE("G_chi") {
    CHECK(eval_G_chi(-1.0, 0.0) == 0.0);
    for (double R : {-0.5, -1.0, -3.0}) {
        const double edge = -(std::abs(R) / 8.0) * std::exp(R / 2);
        CHECK(std::abs(eval_G_chi(R, std::abs(R)) - edge) < 1e-16);
        CHECK(std::abs(eval_G_chi(R, std::abs(R) * (1 - 1e-9)) - edge) < 1e-9);
        CHECK(eval_G_chi(R, -5.0) == -eval_G_chi(R, 5.0));
    }
    CHECK(rel(eval_G_chi(-1.0, 0.5), std::exp(-0.5) * oracle::f(-0.75, 1)) < 1e-14);
}

TEST_CASE("G_h") {
    for (double R : {-0.5, -1.0, -2.0}) {
        const double ext = std::exp(R / 2) * (0.5 + std::abs(R) / 8.0);
        CHECK(rel(eval_G_h(R, 3.0), ext) < 1e-15);
        CHECK(std::abs(eval_G_h(R, std::abs(R) * (1 - 1e-9)) - ext) < 1e-8);
        CHECK(eval_G_h(R, 0.2) == eval_G_h(R, -0.2));
    }
    CHECK(std::abs(eval_G_h(-1e-12, 0.0) - 0.5) < 1e-11);
    CHECK(std::abs(eval_G_h(-1.0, 0.25) - oracle::G_h(-1.0, 0.25)) < 1e-11);
}

TEST_CASE("entropy generator: eta limits") {
    const auto gauss = [](double s) { return std::exp(-s * s / 2); };
    const auto gen = EntropyGenerator::from_function(gauss, -8, 8, 1601);
    for (double u : {-0.5, 0.0, 0.7}) {
        CHECK(entropy_eta(gen, 0.0, u) == 0.0);
        CHECK(std::abs(entropy_eta(gen, -1e-9, u)) < 1e-8);
        double prev = 1.0;
        for (double delta : {1e-2, 1e-3, 1e-4}) {
            const double slope = (entropy_eta(gen, -delta, u) - 0.0) / (-delta);
            const double err = std::abs(slope + 2 * gauss(u));
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-4);
    }
    const auto zero = EntropyGenerator::from_function([](double) { return 0.0; }, -4, 4, 81);
    CHECK(entropy_eta(zero, -1.0, 0.3) == 0.0);
    CHECK(entropy_flux_q(zero, -1.0, 0.3) == 0.0);
    CHECK_THROWS_AS(entropy_eta(gen, 0.5, 0.0), DomainError);
}

TEST_CASE("entropy generator: eta and q against an independent quadrature") {
    const auto gauss = [](double s) { return std::exp(-s * s / 2); };
    const auto gen = EntropyGenerator::from_function(gauss, -10, 10, 4001);
    const double R = -1.0, u = 0.0;
    const double eta_ref = oracle::gk([&](double s) { return oracle::chi(R, u - s) * gauss(s); },
                                      u - 1, u + 1);
    const double q_in = oracle::gk([&](double s) { return oracle::h(R, u - s) * gauss(s); }, u, u + 1) +
                        oracle::gk([&](double s) { return oracle::h(R, u - s) * gauss(s); }, u - 1, u);
    const double q_out = -oracle::gk(gauss, -10, u - 1) + oracle::gk(gauss, u + 1, 10);
    CHECK(std::abs(entropy_eta(gen, R, u) - eta_ref) < 1e-10);
    CHECK(std::abs(entropy_flux_q(gen, R, u) - (u * eta_ref + q_in + q_out)) < 1e-10);
}

TEST_CASE("entropy generator: flux compatibility by finite differences") {
    const auto gen =
        EntropyGenerator::from_function([](double s) { return std::exp(-s * s); }, -6, 6, 1201);
    const double d = 1e-3;
    auto Q = [&](double R, double u) { return entropy_flux_q(gen, R, u) - u * entropy_eta(gen, R, u); };
    for (auto [R, u] : {std::pair{-0.7, 0.1}, std::pair{-1.5, -0.4}}) {
        const double QR = (Q(R + d, u) - Q(R - d, u)) / (2 * d);
        const double Qu = (Q(R, u + d) - Q(R, u - d)) / (2 * d);
        const double eR = (entropy_eta(gen, R + d, u) - entropy_eta(gen, R - d, u)) / (2 * d);
        const double eu = (entropy_eta(gen, R, u + d) - entropy_eta(gen, R, u - d)) / (2 * d);
        CHECK(std::abs(QR - eu) < 1e-5);
        CHECK(std::abs(Qu - (eR - entropy_eta(gen, R, u))) < 1e-5);
    }
}

TEST_CASE("linear interpolation and trapezoid rule are accepted") {
    const auto gen = EntropyGenerator::from_function([](double s) { return std::exp(-s * s); }, -6,
                                                     6, 2401, Interp::linear, QuadRule::trapezoid);
    const auto ref = EntropyGenerator::from_function([](double s) { return std::exp(-s * s); }, -6, 6, 2401);
    CHECK(std::abs(entropy_eta(gen, -1.0, 0.2) - entropy_eta(ref, -1.0, 0.2)) < 1e-4);
    CHECK_THROWS_AS(EntropyGenerator({1.0, 2.0}, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(EntropyGenerator({1.0, 2.0, NAN, 1.0, 1.0}, 0.0, 0.1), DomainError);
}

TEST_CASE("fundamental solution pairing") {
    const auto away = make_bump_ru(-1.0, 0.2, 0.4, 0.4);
    CHECK(std::abs(fundamental_solution_pairing(away, 1.0 / 256)) < 2e-3);
    const auto bump = make_bump_ru(0.0, 0.0, 0.8, 0.8);
    const double p = fundamental_solution_pairing(bump, 1.0 / 256);
    CHECK(std::abs(p - 4.0) < 0.02 * 4.0);
    const auto wide = make_bump_ru(0.1, 0.3, 0.7, 0.9);
    const double shifted = fundamental_solution_pairing(wide, 1.0 / 256, cfg, 0.25);
    CHECK(std::abs(shifted - 4.0 * wide.phi(0.0, 0.25)) < 0.02 * 4.0 * wide.phi(0.0, 0.25));
    TestFunctionRU open = bump;
    open.R_hi = INFINITY;
    CHECK_THROWS_AS(fundamental_solution_pairing(open, 0.01), DomainError);
}

TEST_CASE("singular decompositions") {
    const auto far = make_bump_s(5.0, 0.5);
    CHECK(singular_pairing_chi_s(-1.0, 0.0, far) == 0.0);
    CHECK(singular_pairing_h_s(-1.0, 0.0, far) == 0.0);
    CHECK(direct_pairing_chi_s(-1.0, 0.0, far) == 0.0);
    // flat plateau over the support: every term cancels
    TestFunctionS flat{-3.0, 3.0, [](double) { return 1.0; }, [](double) { return 0.0; }};
    CHECK(std::abs(singular_pairing_chi_s(-1.0, 0.0, flat)) < 1e-13);
    const auto phi = make_bump_s(0.1, 1.5);
    CHECK(std::abs(singular_pairing_chi_s(-1.0, 0.0, phi) - direct_pairing_chi_s(-1.0, 0.0, phi)) < 1e-6);
    CHECK(std::abs(singular_pairing_h_s(-1.0, 0.0, phi) - direct_pairing_h_s(-1.0, 0.0, phi)) < 1e-6);
    CHECK(std::abs(direct_pairing_chi_s(-1.0, 0.2, make_bump_s(0.1, 1.5, std::exp(-1.0))) - 0.0595849299427) < 1e-9);
    CHECK(std::abs(direct_pairing_h_s(-1.0, 0.2, make_bump_s(0.1, 1.5, std::exp(-1.0))) - 0.43621036667) < 1e-9);
}
