#include "isolab/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "isolab/errors.hpp"

namespace isolab {

void RiemannData::validate() const {
    for (double v : {rho_l, u_l, rho_r, u_r})
        if (!std::isfinite(v)) throw DomainError("RiemannData: non-finite state");
    if (!(rho_l > 0.0) || !(rho_r > 0.0))
        throw DomainError("RiemannData: densities must be strictly positive");
}

namespace {

// velocity reached from state (rho_k, u_k) along the wave curve of family `sign`
// (-1 for the 1-family, +1 for the 2-family) at density e^y, with d/dy
struct Curve {
    double u, du;
};

Curve wave_curve(double rho_k, double u_k, double y, int sign) {
    const double rho = std::exp(y);
    if (rho <= rho_k) return {u_k + sign * (y - std::log(rho_k)), static_cast<double>(sign)};
    const double root = std::sqrt(rho * rho_k);
    return {u_k + sign * (rho - rho_k) / root, sign * (rho + rho_k) / (2.0 * root)};
}

}  // namespace

WaveFan solve_riemann(const RiemannData& d) {
    d.validate();
    WaveFan fan;
    fan.data = d;
    if (d.rho_l == d.rho_r && d.u_l == d.u_r) {
        fan.rho_m = d.rho_l;
        fan.u_m = d.u_l;
        return fan;
    }
    auto g = [&](double y) {
        return wave_curve(d.rho_l, d.u_l, y, -1).u - wave_curve(d.rho_r, d.u_r, y, +1).u;
    };
    constexpr double lo = -40.0, hi = 40.0;
    if (!(g(lo) > 0.0) || !(g(hi) < 0.0))
        throw NumericalError("solve_riemann: middle density not bracketed in [e^-40, e^40]");

    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::bisect(
        g, lo, hi, boost::math::tools::eps_tolerance<double>(30), iters);
    if (iters >= 200) throw NumericalError("solve_riemann: bisection did not converge");
    const double guess = 0.5 * (bracket.first + bracket.second);
    std::uintmax_t newton_iters = 50;
    const double y = boost::math::tools::newton_raphson_iterate(
        [&](double t) {
            const Curve a = wave_curve(d.rho_l, d.u_l, t, -1);
            const Curve b = wave_curve(d.rho_r, d.u_r, t, +1);
            return std::make_pair(a.u - b.u, a.du - b.du);
        },
        guess, bracket.first, bracket.second, std::numeric_limits<double>::digits, newton_iters);
    fan.rho_m = std::exp(y);
    fan.u_m = 0.5 * (wave_curve(d.rho_l, d.u_l, y, -1).u + wave_curve(d.rho_r, d.u_r, y, +1).u);

    if (fan.rho_m > d.rho_l) {
        const double s = d.u_l - std::sqrt(fan.rho_m / d.rho_l);
        fan.wave1 = {WaveType::shock, s, s};
    } else if (fan.rho_m < d.rho_l) {
        fan.wave1 = {WaveType::rarefaction, d.u_l - 1.0, fan.u_m - 1.0};
    }
    if (fan.rho_m > d.rho_r) {
        const double s = d.u_r + std::sqrt(fan.rho_m / d.rho_r);
        fan.wave2 = {WaveType::shock, s, s};
    } else if (fan.rho_m < d.rho_r) {
        fan.wave2 = {WaveType::rarefaction, fan.u_m + 1.0, d.u_r + 1.0};
    }
    return fan;
}

FanSample sample_fan(const WaveFan& fan, double xi) {
    const RiemannData& d = fan.data;
    const Wave& w1 = fan.wave1;
    const Wave& w2 = fan.wave2;
    if (w1.type == WaveType::none && w2.type == WaveType::none && d.rho_l == d.rho_r &&
        d.u_l == d.u_r)
        return {d.rho_l, d.u_l};
    if (w1.type == WaveType::shock && xi < w1.speed_lo) return {d.rho_l, d.u_l};
    if (w1.type == WaveType::rarefaction) {
        if (xi < w1.speed_lo) return {d.rho_l, d.u_l};
        if (xi < w1.speed_hi) {
            const double u = xi + 1.0;
            return {std::exp(d.u_l + std::log(d.rho_l) - u), u};  // w constant
        }
    }
    if (w2.type == WaveType::shock && xi > w2.speed_hi) return {d.rho_r, d.u_r};
    if (w2.type == WaveType::rarefaction) {
        if (xi > w2.speed_hi) return {d.rho_r, d.u_r};
        if (xi > w2.speed_lo) {
            const double u = xi - 1.0;
            return {std::exp(u - (d.u_r - std::log(d.rho_r))), u};  // z constant
        }
    }
    return {fan.rho_m, fan.u_m};
}

double rankine_hugoniot_residual(double rho_a, double u_a, double rho_b, double u_b, double s) {
    const double mass = s * (rho_b - rho_a) - (rho_b * u_b - rho_a * u_a);
    const double mom =
        s * (rho_b * u_b - rho_a * u_a) - (rho_b * u_b * u_b + rho_b - rho_a * u_a * u_a - rho_a);
    return std::max(std::abs(mass), std::abs(mom));
}

double fan_rh_residual(const WaveFan& fan) {
    double r = 0.0;
    const RiemannData& d = fan.data;
    if (fan.wave1.type == WaveType::shock)
        r = std::max(r, rankine_hugoniot_residual(d.rho_l, d.u_l, fan.rho_m, fan.u_m, fan.wave1.speed_lo));
    if (fan.wave2.type == WaveType::shock)
        r = std::max(r, rankine_hugoniot_residual(fan.rho_m, fan.u_m, d.rho_r, d.u_r, fan.wave2.speed_lo));
    return r;
}

bool fan_is_admissible(const WaveFan& fan) {
    const RiemannData& d = fan.data;
    bool ok = true;
    if (fan.wave1.type == WaveType::shock) {
        const double s = fan.wave1.speed_lo;
        ok = ok && fan.rho_m > d.rho_l && d.u_l - 1.0 > s && s > fan.u_m - 1.0;
    }
    if (fan.wave2.type == WaveType::shock) {
        const double s = fan.wave2.speed_lo;
        ok = ok && fan.rho_m > d.rho_r && fan.u_m + 1.0 > s && s > d.u_r + 1.0;
    }
    if (fan.wave1.type == WaveType::rarefaction) ok = ok && fan.wave1.speed_lo <= fan.wave1.speed_hi;
    if (fan.wave2.type == WaveType::rarefaction) ok = ok && fan.wave2.speed_lo <= fan.wave2.speed_hi;
    return ok;
}

std::pair<std::vector<double>, std::vector<double>> sample_fan_on(const WaveFan& fan,
                                                                  const std::vector<double>& xs,
                                                                  double t, double x0) {
    if (!(t > 0.0)) throw DomainError("sample_fan_on: t must be positive");
    std::vector<double> rho(xs.size()), u(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const FanSample s = sample_fan(fan, (xs[i] - x0) / t);
        rho[i] = s.rho;
        u[i] = s.u;
    }
    return {std::move(rho), std::move(u)};
}

}  // namespace isolab
