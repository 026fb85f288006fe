#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "isolab/quadrature.hpp"

namespace isolab {

/// Constants and truncation policy shared by every kernel evaluator.
struct KernelConfig {
    double A = 0.25;
    double A2 = 0.0625;
    int max_terms = 200;
    double tail_tol = 1e-14;
    /// absolute tolerance of the adaptive quadratures inside H, h, G_h
    double quad_tol = 1e-12;

    void validate() const;
};

struct KernelPoint {
    double R = 0.0;
    double u = 0.0;
    double s = 0.0;
};

struct FDerivs {
    double f = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

/// Series f(m) = sum_n (-A^2 m)^n / (n!)^2.
double eval_f(double m, const KernelConfig& cfg = {});
/// f, f', f'' from term-wise differentiated series.
FDerivs eval_f_derivs(double m, const KernelConfig& cfg = {});

double eval_chi(const KernelPoint& p, const KernelConfig& cfg = {});
double eval_H(const KernelPoint& p, const KernelConfig& cfg = {});
double eval_h(const KernelPoint& p, const KernelConfig& cfg = {});
double eval_sigma(const KernelPoint& p, const KernelConfig& cfg = {});

/// Bounded part of chi_s, written in the variable v. The distributional
/// derivative of chi(R, u - s) in s uses eval_G_chi(R, s - u).
double eval_G_chi(double R, double v, const KernelConfig& cfg = {});
/// Bounded part of h_s (even in v).
double eval_G_h(double R, double v, const KernelConfig& cfg = {});

// ---------------------------------------------------------------------------
// entropy generators

enum class Interp { cubic, linear };

/// Weight psi sampled on s0 + k*step, k = 0..n-1, zero outside the grid.
class EntropyGenerator {
public:
    EntropyGenerator(std::vector<double> samples, double s0, double step,
                     Interp interp = Interp::cubic, QuadRule rule = QuadRule::simpson,
                     int panels_per_cell = 4);

    static EntropyGenerator from_function(const Fn1& psi, double s_lo, double s_hi, int n,
                                          Interp interp = Interp::cubic,
                                          QuadRule rule = QuadRule::simpson);

    double psi(double s) const;
    double s_min() const { return s0_; }
    double s_max() const { return s0_ + step_ * static_cast<double>(samples_.size() - 1); }
    double step() const { return step_; }
    const std::vector<double>& samples() const { return samples_; }
    QuadRule rule() const { return rule_; }
    Interp interp() const { return interp_; }

    /// Integral of g(s) psi(s) over [lo, hi], split at grid knots and at `breaks`.
    double integrate(const Fn1& g, double lo, double hi, std::vector<double> breaks = {}) const;

private:
    std::vector<double> samples_;
    double s0_;
    double step_;
    Interp interp_;
    QuadRule rule_;
    int panels_;
    Fn1 eval_;
};

double entropy_eta(const EntropyGenerator& gen, double R, double u, const KernelConfig& cfg = {});
double entropy_flux_q(const EntropyGenerator& gen, double R, double u,
                      const KernelConfig& cfg = {});

// ---------------------------------------------------------------------------
// distributional pairings

/// Smooth test function of (R, u) with the derivatives needed by L*.
struct TestFunctionRU {
    std::function<double(double, double)> phi, phi_R, phi_RR, phi_uu;
    double R_lo = 0.0, R_hi = 0.0, u_lo = 0.0, u_hi = 0.0;
};

/// Tensor-product bump with value 1 at (cR, cu) and half-widths aR, aU.
TestFunctionRU make_bump_ru(double cR, double cu, double aR, double aU, double amplitude = 1.0);

/// <chi(., . - s0), phi_RR - phi_uu + phi_R> on a tensor grid of spacing quad_step.
double fundamental_solution_pairing(const TestFunctionRU& tf, double quad_step,
                                    const KernelConfig& cfg = {}, double s0 = 0.0);

/// Test function of s on [lo, hi].
struct TestFunctionS {
    double lo = 0.0, hi = 0.0;
    Fn1 value, derivative;
};

TestFunctionS make_bump_s(double center, double half_width, double amplitude = 1.0);

/// Delta terms plus the bounded part, paired with phi.
double singular_pairing_chi_s(double R, double u, const TestFunctionS& tf,
                              const KernelConfig& cfg = {});
double singular_pairing_h_s(double R, double u, const TestFunctionS& tf,
                            const KernelConfig& cfg = {});
/// <chi(R, u - .), -phi'> and <h(R, u - .), -phi'> by quadrature.
double direct_pairing_chi_s(double R, double u, const TestFunctionS& tf,
                            const KernelConfig& cfg = {});
double direct_pairing_h_s(double R, double u, const TestFunctionS& tf,
                          const KernelConfig& cfg = {});

// ---------------------------------------------------------------------------
// symmetry group of eta_wz = (eta_z - eta_w) / 4

struct GridSpec {
    double w0 = 0.0, dw = 1.0;
    int nw = 0;
    double z0 = 0.0, dz = 1.0;
    int nz = 0;

    double w(int i) const { return w0 + dw * i; }
    double z(int j) const { return z0 + dz * j; }
};

struct WZSamples {
    GridSpec grid;
    std::vector<double> values;  // index i * nz + j

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nz + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nz + j]; }
    /// bilinear; DomainError outside the sampled rectangle
    double interpolate(double w, double z) const;
};

WZSamples sample_wz(const GridSpec& g, const std::function<double(double, double)>& fn);
/// e^{A(w - z)} f(wz)
WZSamples sample_invariant_solution(const GridSpec& g, const KernelConfig& cfg = {});

struct LieAction {
    enum class Kind { translate_w, translate_z, scale, boost, add_solution };
    Kind kind = Kind::scale;
    double param = 1.0;
    std::shared_ptr<const WZSamples> beta;

    static LieAction translate_w(double c) { return {Kind::translate_w, c, nullptr}; }
    static LieAction translate_z(double c) { return {Kind::translate_z, c, nullptr}; }
    static LieAction scale(double c) { return {Kind::scale, c, nullptr}; }
    static LieAction boost(double xi) { return {Kind::boost, xi, nullptr}; }
    static LieAction add_solution(std::shared_ptr<const WZSamples> b) {
        return {Kind::add_solution, 0.0, std::move(b)};
    }
};

/// Transformed samples. Translations move the grid origin; the other actions keep the grid.
WZSamples apply_lie_action(const WZSamples& in, const LieAction& action,
                           const KernelConfig& cfg = {});
/// Transformed function evaluated on an explicit output grid (bilinear reads).
WZSamples apply_lie_action(const WZSamples& in, const LieAction& action, const GridSpec& out,
                           const KernelConfig& cfg = {});

/// max over interior nodes of |eta_wz - (eta_z - eta_w)/4| by central differences
double wave_residual(const WZSamples& s);

}  // namespace isolab
