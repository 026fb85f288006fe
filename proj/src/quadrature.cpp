#include "isolab/quadrature.hpp"

#include <cmath>
#include <string>

#include "isolab/errors.hpp"

namespace isolab {

namespace {

struct Panel {
    double a, m, b, fa, fm, fb, whole;
};

double simpson_rec(const Fn1& f, const Panel& p, double tol, int depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double diff = left + right - p.whole;
    if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    if (depth <= 0 || !(p.m > p.a && p.b > p.m)) {
        throw PrecisionError("adaptive Simpson did not converge on [" + std::to_string(p.a) + ", " +
                                 std::to_string(p.b) + "]",
                             std::abs(diff));
    }
    return simpson_rec(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
           simpson_rec(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Fn1& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    if (a > b) return -adaptive_simpson(f, b, a, tol, max_depth);
    // start from four panels so narrow features are not skipped by the first estimate
    constexpr int n0 = 4;
    double total = 0.0;
    const double h = (b - a) / n0;
    for (int i = 0; i < n0; ++i) {
        const double pa = a + i * h;
        const double pb = (i == n0 - 1) ? b : a + (i + 1) * h;
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(pm), fb = f(pb);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(f, {pa, pm, pb, fa, fm, fb, whole}, tol / n0, max_depth);
    }
    return total;
}

double composite(const Fn1& f, double a, double b, int panels, QuadRule rule) {
    if (a == b) return 0.0;
    if (panels < 1) panels = 1;
    if (rule == QuadRule::simpson && panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    std::vector<double> terms(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) {
        const double x = (i == panels) ? b : a + i * h;
        double w;
        if (i == 0 || i == panels) {
            w = (rule == QuadRule::simpson) ? 1.0 / 3.0 : 0.5;
        } else if (rule == QuadRule::simpson) {
            w = (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
        } else {
            w = 1.0;
        }
        terms[static_cast<std::size_t>(i)] = w * f(x);
    }
    return h * pairwise_sum(terms);
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> trapezoid_weights(std::span<const double> x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace isolab
