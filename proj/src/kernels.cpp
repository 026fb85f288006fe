#include "isolab/kernels.hpp"

#include <cmath>
#include <string>

#include "isolab/errors.hpp"
#include "kernel_detail.hpp"

namespace isolab {

void KernelConfig::validate() const {
    if (A2 != A * A) throw DomainError("KernelConfig: A2 must equal A*A");
    if (max_terms < 4) throw DomainError("KernelConfig: max_terms must be at least 4");
    if (!(tail_tol > 0.0) || !(quad_tol > 0.0))
        throw DomainError("KernelConfig: tolerances must be positive");
}

namespace {

/// Sum a series from its first term and a ratio t_{n+1}/t_n = ratio(n).
template <class Ratio>
double sum_series(double t0, Ratio ratio, const KernelConfig& cfg, const char* name) {
    double sum = 0.0, comp = 0.0;
    double t = t0;
    for (int n = 0; n < cfg.max_terms; ++n) {
        // Neumaier compensation keeps the alternating branch at rounding level
        const double y = sum + t;
        comp += (std::abs(sum) >= std::abs(t)) ? (sum - y) + t : (t - y) + sum;
        sum = y;
        if (n >= 3 && std::abs(t) < cfg.tail_tol) return sum + comp;
        t *= ratio(n);
    }
    throw PrecisionError(std::string(name) + ": truncation cap reached, last term " +
                             std::to_string(std::abs(t)),
                         std::abs(t));
}

void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

}  // namespace

double eval_f(double m, const KernelConfig& cfg) {
    check_finite(m, "eval_f");
    const double x = -cfg.A2 * m;
    return sum_series(
        1.0, [x](int n) { return x / ((n + 1.0) * (n + 1.0)); }, cfg, "eval_f");
}

FDerivs eval_f_derivs(double m, const KernelConfig& cfg) {
    check_finite(m, "eval_f_derivs");
    const double x = -cfg.A2 * m;
    FDerivs d;
    d.f = sum_series(
        1.0, [x](int n) { return x / ((n + 1.0) * (n + 1.0)); }, cfg, "eval_f_derivs");
    d.f1 = sum_series(
        -cfg.A2, [x](int k) { return x / ((k + 2.0) * (k + 1.0)); }, cfg, "eval_f_derivs");
    d.f2 = sum_series(
        0.5 * cfg.A2 * cfg.A2, [x](int k) { return x / ((k + 3.0) * (k + 1.0)); }, cfg,
        "eval_f_derivs");
    return d;
}

namespace detail {

double chi_closed(double R, double v, const KernelConfig& cfg) {
    return std::exp(0.5 * R) * eval_f(v * v - R * R, cfg);
}

double h_inner(double R, double v, const KernelConfig& cfg) {
    const double a = std::abs(v);
    const double aR = std::abs(R);
    const double sg = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    double integral = 0.0;
    if (a < aR) {
        integral = adaptive_simpson(
            [&](double r) { return std::exp(0.5 * r) * eval_f_derivs(a * a - r * r, cfg).f1; },
            -aR, -a, cfg.quad_tol);
    }
    return sg * (std::exp(-0.5 * a) - 1.0) - 2.0 * v * integral;
}

void require_nonpositive_R(double R, const char* what) {
    check_finite(R, what);
    if (R > 0.0) throw DomainError(std::string(what) + ": only the branch R <= 0 is supported");
}

}  // namespace detail

double eval_chi(const KernelPoint& p, const KernelConfig& cfg) {
    check_finite(p.R, "eval_chi");
    check_finite(p.u, "eval_chi");
    check_finite(p.s, "eval_chi");
    const double v = p.u - p.s;
    if (!(std::abs(v) < std::abs(p.R))) return 0.0;
    return detail::chi_closed(p.R, v, cfg);
}

double eval_H(const KernelPoint& p, const KernelConfig& cfg) {
    detail::require_nonpositive_R(p.R, "eval_H");
    const double a = std::abs(p.u - p.s);
    const double aR = std::abs(p.R);
    if (a >= aR) return a;
    return a + adaptive_simpson(
                   [&](double r) { return std::exp(0.5 * r) * eval_f(a * a - r * r, cfg); }, -aR,
                   -a, cfg.quad_tol);
}

double eval_h(const KernelPoint& p, const KernelConfig& cfg) {
    detail::require_nonpositive_R(p.R, "eval_h");
    check_finite(p.u, "eval_h");
    check_finite(p.s, "eval_h");
    if (p.u == p.s) throw DomainError("eval_h: undefined at u = s, use one-sided limits");
    const double v = p.u - p.s;
    if (std::abs(v) >= std::abs(p.R)) return v > 0.0 ? -1.0 : 1.0;
    return detail::h_inner(p.R, v, cfg);
}

double eval_sigma(const KernelPoint& p, const KernelConfig& cfg) {
    return p.u * eval_chi(p, cfg) + eval_h(p, cfg);
}

double eval_G_chi(double R, double v, const KernelConfig& cfg) {
    check_finite(R, "eval_G_chi");
    check_finite(v, "eval_G_chi");
    const double aR = std::abs(R);
    const double e = std::exp(0.5 * R);
    if (v >= aR) return -2.0 * aR * cfg.A2 * e;
    if (v <= -aR) return 2.0 * aR * cfg.A2 * e;
    return 2.0 * e * v * eval_f_derivs(v * v - R * R, cfg).f1;
}

double eval_G_h(double R, double v, const KernelConfig& cfg) {
    detail::require_nonpositive_R(R, "eval_G_h");
    check_finite(v, "eval_G_h");
    const double aR = std::abs(R);
    const double a = std::abs(v);
    const double lin = 0.5 + 2.0 * cfg.A2 * std::min(a, aR);
    if (a >= aR) return std::exp(0.5 * R) * lin;
    const double integral = adaptive_simpson(
        [&](double r) {
            const FDerivs d = eval_f_derivs(a * a - r * r, cfg);
            return std::exp(0.5 * r) * (d.f1 + 2.0 * a * a * d.f2);
        },
        -aR, -a, cfg.quad_tol);
    return std::exp(-0.5 * a) * lin + 2.0 * integral;
}

}  // namespace isolab
