#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"
#include "kernel_detail.hpp"

namespace isolab {

EntropyGenerator::EntropyGenerator(std::vector<double> samples, double s0, double step,
                                   Interp interp, QuadRule rule, int panels_per_cell)
    : samples_(std::move(samples)),
      s0_(s0),
      step_(step),
      interp_(interp),
      rule_(rule),
      panels_(panels_per_cell) {
    if (samples_.size() < 5) throw DomainError("EntropyGenerator: need at least 5 samples");
    if (!(step_ > 0.0) || !std::isfinite(step_) || !std::isfinite(s0_))
        throw DomainError("EntropyGenerator: invalid grid");
    if (panels_ < 1) throw DomainError("EntropyGenerator: panels_per_cell must be positive");
    double mass = 0.0;
    for (double v : samples_) {
        if (!std::isfinite(v)) throw DomainError("EntropyGenerator: non-finite sample");
        mass += std::abs(v) * step_;
    }
    if (!std::isfinite(mass)) throw DomainError("EntropyGenerator: psi is not integrable");

    const double lo = s_min(), hi = s_max();
    if (interp_ == Interp::cubic) {
        auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
            samples_.begin(), samples_.end(), s0_, step_);
        eval_ = [spline, lo, hi](double s) {
            if (s < lo || s > hi) return 0.0;
            return (*spline)(s);
        };
    } else {
        auto data = std::make_shared<const std::vector<double>>(samples_);
        eval_ = [data, lo, hi, h = step_](double s) {
            if (s < lo || s > hi) return 0.0;
            const double x = (s - lo) / h;
            auto i = static_cast<std::size_t>(std::floor(x));
            if (i >= data->size() - 1) i = data->size() - 2;
            const double t = x - static_cast<double>(i);
            return (1.0 - t) * (*data)[i] + t * (*data)[i + 1];
        };
    }
}

EntropyGenerator EntropyGenerator::from_function(const Fn1& psi, double s_lo, double s_hi, int n,
                                                 Interp interp, QuadRule rule) {
    if (n < 5 || !(s_hi > s_lo)) throw DomainError("EntropyGenerator::from_function: bad grid");
    const double step = (s_hi - s_lo) / (n - 1);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = psi(s_lo + step * i);
    return EntropyGenerator(std::move(v), s_lo, step, interp, rule);
}

double EntropyGenerator::psi(double s) const { return eval_(s); }

double EntropyGenerator::integrate(const Fn1& g, double lo, double hi,
                                   std::vector<double> breaks) const {
    lo = std::max(lo, s_min());
    hi = std::min(hi, s_max());
    if (!(hi > lo)) return 0.0;
    std::vector<double> pts{lo, hi};
    const auto k0 = static_cast<long>(std::floor((lo - s0_) / step_)) + 1;
    const auto k1 = static_cast<long>(std::ceil((hi - s0_) / step_)) - 1;
    for (long k = k0; k <= k1; ++k) {
        const double s = s0_ + step_ * static_cast<double>(k);
        if (s > lo && s < hi) pts.push_back(s);
    }
    for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> pieces;
    pieces.reserve(pts.size());
    const Fn1 integrand = [&](double s) { return g(s) * eval_(s); };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        pieces.push_back(composite(integrand, pts[i], pts[i + 1], panels_, rule_));
    return pairwise_sum(pieces);
}

double entropy_eta(const EntropyGenerator& gen, double R, double u, const KernelConfig& cfg) {
    detail::require_nonpositive_R(R, "entropy_eta");
    const double a = std::abs(R);
    if (a == 0.0) return 0.0;
    return gen.integrate([&](double s) { return detail::chi_closed(R, u - s, cfg); }, u - a,
                         u + a);
}

double entropy_flux_q(const EntropyGenerator& gen, double R, double u, const KernelConfig& cfg) {
    detail::require_nonpositive_R(R, "entropy_flux_q");
    const double a = std::abs(R);
    const Fn1 one = [](double) { return 1.0; };
    // outside the support h = -sgn(u - s)
    const double outer =
        -gen.integrate(one, gen.s_min(), u - a) + gen.integrate(one, u + a, gen.s_max());
    if (a == 0.0) return outer;
    const double eta = entropy_eta(gen, R, u, cfg);
    const double inner =
        gen.integrate([&](double s) { return detail::h_inner(R, u - s, cfg); }, u - a, u + a, {u});
    return u * eta + inner + outer;
}

}  // namespace isolab
