#include <doctest.h>

#include <cmath>
#include <memory>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"

using namespace isolab;

namespace {

GridSpec grid(double lo, double hi, int n) {
    const double d = (hi - lo) / (n - 1);
    return {lo, d, n, lo, d, n};
}

// exp(a w + b z) solves the equation when a b = (b - a)/4
double exp_solution(double w, double z) {
    const double a = 3.0, b = -0.25 * a / (a - 0.25);
    return std::exp(a * w + b * z);
}

double max_diff(const WZSamples& x, const WZSamples& y) {
    double m = 0.0;
    for (std::size_t k = 0; k < x.values.size(); ++k)
        m = std::max(m, std::abs(x.values[k] - y.values[k]));
    return m;
}

}  // namespace

TEST_CASE("identity parameters leave samples unchanged") {
    const auto s = sample_invariant_solution(grid(0.1, 1.0, 21));
    for (const auto& act : {LieAction::translate_w(0.0), LieAction::translate_z(0.0),
                            LieAction::scale(1.0), LieAction::boost(0.0)}) {
        const auto t = apply_lie_action(s, act);
        CHECK(t.grid.w0 == s.grid.w0);
        CHECK(t.grid.z0 == s.grid.z0);
        CHECK(max_diff(t, s) == 0.0);
    }
    auto zero = std::make_shared<WZSamples>(s);
    for (double& v : zero->values) v = 0.0;
    CHECK(max_diff(apply_lie_action(s, LieAction::add_solution(zero)), s) == 0.0);
}

TEST_CASE("translations and scaling keep the discrete residual small") {
    const auto s = sample_invariant_solution(grid(-1.0, 1.0, 41));
    const double r0 = wave_residual(s);
    CHECK(r0 < 1e-3);
    for (const auto& act : {LieAction::translate_w(0.37), LieAction::translate_z(-0.2),
                            LieAction::scale(2.5)}) {
        CHECK(wave_residual(apply_lie_action(s, act)) <= 10.0 * r0);
    }
    // the interpolating variant on a shifted grid stays a near-solution too
    const auto moved = apply_lie_action(s, LieAction::translate_w(0.1), grid(-0.8, 0.8, 33));
    CHECK(wave_residual(moved) < 10.0 * r0 + 1e-2);
}

TEST_CASE("invariant solution residual vanishes under refinement") {
    double prev = INFINITY;
    for (int n : {21, 41, 81, 161}) {
        const double r = wave_residual(sample_invariant_solution(grid(-1.5, 1.5, n)));
        CHECK(r < prev / 3.0);
        prev = r;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("boost and superposition map solutions to solutions") {
    const GridSpec big = grid(-2.0, 2.0, 201);
    const auto s = sample_wz(big, exp_solution);
    const auto boosted = apply_lie_action(s, LieAction::boost(0.3), grid(-1.0, 1.0, 101));
    const double ref = wave_residual(sample_wz(grid(-1.0, 1.0, 101), exp_solution));
    CHECK(wave_residual(boosted) < 20.0 * ref + 1e-3);
    CHECK_THROWS_AS(apply_lie_action(s, LieAction::boost(0.3)), DomainError);

    auto beta = std::make_shared<WZSamples>(sample_invariant_solution(big));
    const auto sum = apply_lie_action(s, LieAction::add_solution(beta));
    CHECK(wave_residual(sum) <= (wave_residual(s) + wave_residual(*beta)) * (1 + 1e-9));
}

TEST_CASE("group closure of w-translations") {
    const auto s = sample_invariant_solution(grid(-1.0, 1.0, 41));
    const auto a = apply_lie_action(apply_lie_action(s, LieAction::translate_w(0.2)),
                                    LieAction::translate_w(0.15));
    const auto b = apply_lie_action(s, LieAction::translate_w(0.35));
    CHECK(std::abs(a.grid.w0 - b.grid.w0) < 1e-15);
    CHECK(max_diff(a, b) == 0.0);
    const GridSpec out = grid(-0.3, 0.3, 31);
    const auto c = apply_lie_action(apply_lie_action(s, LieAction::translate_w(0.2), grid(-0.6, 0.6, 61)),
                                    LieAction::translate_w(0.15), out);
    const auto d = apply_lie_action(s, LieAction::translate_w(0.35), out);
    CHECK(max_diff(c, d) < 1e-3);
}
