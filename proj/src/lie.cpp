#include <algorithm>
#include <cmath>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"

namespace isolab {

namespace {

void locate(double x, double x0, double dx, int n, int& i, double& t) {
    const double f = (x - x0) / dx;
    constexpr double slack = 1e-9;
    if (!(f >= -slack && f <= (n - 1) + slack))
        throw DomainError("WZSamples: read outside the sampled rectangle");
    double c = std::clamp(f, 0.0, static_cast<double>(n - 1));
    if (std::abs(c - std::round(c)) < slack) c = std::round(c);
    i = std::min(static_cast<int>(std::floor(c)), n - 2);
    t = c - i;
}

void check_grid(const GridSpec& g) {
    if (g.nw < 2 || g.nz < 2 || !(g.dw > 0.0) || !(g.dz > 0.0))
        throw DomainError("GridSpec: need at least 2x2 nodes and positive spacing");
}

}  // namespace

double WZSamples::interpolate(double w, double z) const {
    int i, j;
    double tw, tz;
    locate(w, grid.w0, grid.dw, grid.nw, i, tw);
    locate(z, grid.z0, grid.dz, grid.nz, j, tz);
    return (1 - tw) * ((1 - tz) * at(i, j) + tz * at(i, j + 1)) +
           tw * ((1 - tz) * at(i + 1, j) + tz * at(i + 1, j + 1));
}

WZSamples sample_wz(const GridSpec& g, const std::function<double(double, double)>& fn) {
    check_grid(g);
    WZSamples s{g, std::vector<double>(static_cast<std::size_t>(g.nw) * g.nz)};
    for (int i = 0; i < g.nw; ++i)
        for (int j = 0; j < g.nz; ++j) s.at(i, j) = fn(g.w(i), g.z(j));
    return s;
}

WZSamples sample_invariant_solution(const GridSpec& g, const KernelConfig& cfg) {
    return sample_wz(g, [&](double w, double z) {
        return std::exp(cfg.A * (w - z)) * eval_f(w * z, cfg);
    });
}

WZSamples apply_lie_action(const WZSamples& in, const LieAction& action, const KernelConfig& cfg) {
    check_grid(in.grid);
    WZSamples out = in;
    switch (action.kind) {
        case LieAction::Kind::translate_w:
            out.grid.w0 = in.grid.w0 - action.param;
            return out;
        case LieAction::Kind::translate_z:
            out.grid.z0 = in.grid.z0 - action.param;
            return out;
        case LieAction::Kind::scale:
            for (double& v : out.values) v *= action.param;
            return out;
        case LieAction::Kind::boost:
        case LieAction::Kind::add_solution:
            return apply_lie_action(in, action, in.grid, cfg);
    }
    return out;
}

WZSamples apply_lie_action(const WZSamples& in, const LieAction& action, const GridSpec& out,
                           const KernelConfig& cfg) {
    check_grid(in.grid);
    const double c = action.param;
    switch (action.kind) {
        case LieAction::Kind::translate_w:
            return sample_wz(out, [&](double w, double z) { return in.interpolate(w + c, z); });
        case LieAction::Kind::translate_z:
            return sample_wz(out, [&](double w, double z) { return in.interpolate(w, z + c); });
        case LieAction::Kind::scale:
            return sample_wz(out, [&](double w, double z) { return c * in.interpolate(w, z); });
        case LieAction::Kind::boost: {
            const double em = std::exp(-c), ep = std::exp(c);
            return sample_wz(out, [&](double w, double z) {
                return in.interpolate(em * w, ep * z) *
                       std::exp(cfg.A * w * (1.0 - em) - cfg.A * z * (1.0 - ep));
            });
        }
        case LieAction::Kind::add_solution:
            if (!action.beta) throw DomainError("apply_lie_action: add_solution without samples");
            return sample_wz(out, [&](double w, double z) {
                return in.interpolate(w, z) + action.beta->interpolate(w, z);
            });
    }
    throw DomainError("apply_lie_action: unknown action");
}

double wave_residual(const WZSamples& s) {
    const GridSpec& g = s.grid;
    double worst = 0.0;
    for (int i = 1; i + 1 < g.nw; ++i) {
        for (int j = 1; j + 1 < g.nz; ++j) {
            const double ewz = (s.at(i + 1, j + 1) - s.at(i + 1, j - 1) - s.at(i - 1, j + 1) +
                                s.at(i - 1, j - 1)) /
                               (4.0 * g.dw * g.dz);
            const double ew = (s.at(i + 1, j) - s.at(i - 1, j)) / (2.0 * g.dw);
            const double ez = (s.at(i, j + 1) - s.at(i, j - 1)) / (2.0 * g.dz);
            worst = std::max(worst, std::abs(ewz - 0.25 * (ez - ew)));
        }
    }
    return worst;
}

}  // namespace isolab
