#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"
#include "kernel_detail.hpp"

namespace isolab {

namespace {

// b(x) = exp(1 - 1/(1 - x^2)) on (-1, 1), b(0) = 1
double bump(double x) {
    const double d = 1.0 - x * x;
    return d > 0.0 ? std::exp(1.0 - 1.0 / d) : 0.0;
}
double bump_d1(double x) {
    const double d = 1.0 - x * x;
    return d > 0.0 ? bump(x) * (-2.0 * x / (d * d)) : 0.0;
}
double bump_d2(double x) {
    const double d = 1.0 - x * x;
    return d > 0.0 ? bump(x) * (6.0 * x * x * x * x - 2.0) / (d * d * d * d) : 0.0;
}

}  // namespace

TestFunctionRU make_bump_ru(double cR, double cu, double aR, double aU, double amplitude) {
    if (!(aR > 0.0) || !(aU > 0.0)) throw DomainError("make_bump_ru: half-widths must be positive");
    TestFunctionRU tf;
    tf.R_lo = cR - aR;
    tf.R_hi = cR + aR;
    tf.u_lo = cu - aU;
    tf.u_hi = cu + aU;
    tf.phi = [=](double R, double u) { return amplitude * bump((R - cR) / aR) * bump((u - cu) / aU); };
    tf.phi_R = [=](double R, double u) {
        return amplitude * bump_d1((R - cR) / aR) / aR * bump((u - cu) / aU);
    };
    tf.phi_RR = [=](double R, double u) {
        return amplitude * bump_d2((R - cR) / aR) / (aR * aR) * bump((u - cu) / aU);
    };
    tf.phi_uu = [=](double R, double u) {
        return amplitude * bump((R - cR) / aR) * bump_d2((u - cu) / aU) / (aU * aU);
    };
    return tf;
}

TestFunctionS make_bump_s(double center, double half_width, double amplitude) {
    if (!(half_width > 0.0)) throw DomainError("make_bump_s: half-width must be positive");
    TestFunctionS tf;
    tf.lo = center - half_width;
    tf.hi = center + half_width;
    tf.value = [=](double s) { return amplitude * bump((s - center) / half_width); };
    tf.derivative = [=](double s) {
        return amplitude * bump_d1((s - center) / half_width) / half_width;
    };
    return tf;
}

double fundamental_solution_pairing(const TestFunctionRU& tf, double quad_step,
                                    const KernelConfig& cfg, double s0) {
    for (double b : {tf.R_lo, tf.R_hi, tf.u_lo, tf.u_hi})
        if (!std::isfinite(b)) throw DomainError("fundamental_solution_pairing: unbounded support");
    if (!(quad_step > 0.0)) throw DomainError("fundamental_solution_pairing: quad_step must be > 0");
    if (!(tf.R_lo < tf.R_hi) || !(tf.u_lo < tf.u_hi))
        throw DomainError("fundamental_solution_pairing: empty support rectangle");

    // nodes on multiples of quad_step (u measured from s0) so the lines |u - s0| = |R| hit nodes
    const long i0 = static_cast<long>(std::ceil(tf.R_lo / quad_step));
    const long i1 = static_cast<long>(std::floor(tf.R_hi / quad_step));
    const long j0 = static_cast<long>(std::ceil((tf.u_lo - s0) / quad_step));
    const long j1 = static_cast<long>(std::floor((tf.u_hi - s0) / quad_step));

    std::vector<double> rows;
    rows.reserve(static_cast<std::size_t>(std::max(0L, i1 - i0 + 1)));
    std::vector<double> row;
    for (long i = i0; i <= i1; ++i) {
        const double R = quad_step * static_cast<double>(i);
        const long k = std::labs(i);
        row.clear();
        for (long j = std::max(j0, -k); j <= std::min(j1, k); ++j) {
            const double v = quad_step * static_cast<double>(j);
            const double u = s0 + v;
            double chi = detail::chi_closed(R, v, cfg);
            if (std::labs(j) == k) chi *= 0.5;  // mean of the one-sided values on the jump
            const double Lphi = tf.phi_RR(R, u) - tf.phi_uu(R, u) + tf.phi_R(R, u);
            row.push_back(chi * Lphi);
        }
        rows.push_back(pairwise_sum(row));
    }
    return pairwise_sum(rows) * quad_step * quad_step;
}

namespace {

double clip_integral(const Fn1& g, double lo, double hi, std::vector<double> breaks, double tol) {
    if (!(hi > lo)) return 0.0;
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> parts;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = std::max(lo, breaks[i]);
        const double b = std::min(hi, breaks[i + 1]);
        if (b > a) parts.push_back(adaptive_simpson(g, a, b, tol));
    }
    return pairwise_sum(parts);
}

double value_or_zero(const TestFunctionS& tf, double s) {
    return (s > tf.lo && s < tf.hi) ? tf.value(s) : 0.0;
}

void require_nonzero_R(double R, const char* what) {
    if (R == 0.0 || !std::isfinite(R)) throw DomainError(std::string(what) + ": requires R != 0");
}

}  // namespace

double singular_pairing_chi_s(double R, double u, const TestFunctionS& tf, const KernelConfig& cfg) {
    require_nonzero_R(R, "singular_pairing_chi_s");
    const double a = std::abs(R);
    const double dirac =
        std::exp(0.5 * R) * (value_or_zero(tf, u - a) - value_or_zero(tf, u + a));
    const double bounded = clip_integral(
        [&](double s) { return eval_G_chi(R, s - u, cfg) * tf.value(s); },
        std::max(tf.lo, u - a), std::min(tf.hi, u + a), {}, cfg.quad_tol);
    return dirac + bounded;
}

double singular_pairing_h_s(double R, double u, const TestFunctionS& tf, const KernelConfig& cfg) {
    require_nonzero_R(R, "singular_pairing_h_s");
    const double a = std::abs(R);
    const double dirac =
        std::exp(0.5 * R) * (value_or_zero(tf, u - a) + value_or_zero(tf, u + a));
    const double bounded = clip_integral(
        [&](double s) { return eval_G_h(R, u - s, cfg) * tf.value(s); }, std::max(tf.lo, u - a),
        std::min(tf.hi, u + a), {u}, cfg.quad_tol);
    return dirac + bounded;
}

double direct_pairing_chi_s(double R, double u, const TestFunctionS& tf, const KernelConfig& cfg) {
    require_nonzero_R(R, "direct_pairing_chi_s");
    const double a = std::abs(R);
    return -clip_integral(
        [&](double s) { return detail::chi_closed(R, u - s, cfg) * tf.derivative(s); },
        std::max(tf.lo, u - a), std::min(tf.hi, u + a), {}, cfg.quad_tol);
}

double direct_pairing_h_s(double R, double u, const TestFunctionS& tf, const KernelConfig& cfg) {
    require_nonzero_R(R, "direct_pairing_h_s");
    detail::require_nonpositive_R(R, "direct_pairing_h_s");
    const double a = std::abs(R);
    const Fn1 inner = [&](double s) { return detail::h_inner(R, u - s, cfg) * tf.derivative(s); };
    const Fn1 left = [&](double s) { return -tf.derivative(s); };
    const Fn1 right = [&](double s) { return tf.derivative(s); };
    const double total =
        clip_integral(left, tf.lo, std::min(tf.hi, u - a), {}, cfg.quad_tol) +
        clip_integral(inner, std::max(tf.lo, u - a), std::min(tf.hi, u + a), {u}, cfg.quad_tol) +
        clip_integral(right, std::max(tf.lo, u + a), tf.hi, {}, cfg.quad_tol);
    return -total;
}

}  // namespace isolab
