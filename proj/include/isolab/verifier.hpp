#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "isolab/kernels.hpp"
#include "isolab/riemann.hpp"
#include "isolab/viscous.hpp"

namespace isolab {

/// States on a common grid at increasing times; states.front() is the initial line.
struct SpaceTime {
    Grid grid;
    std::vector<GridState> states;

    static SpaceTime from_run(const RunResult& run);
    void validate() const;
};

/// Exact Riemann solution sampled at cell centres at times k T / nt, k = 0..nt.
SpaceTime sample_exact(const WaveFan& fan, const Grid& grid, double t_final, int nt,
                       double x0 = 0.0);

struct TestFunction {
    std::function<double(double, double)> phi, phi_x, phi_t;  // (x, t)
    double x_lo = 0.0, x_hi = 0.0, t_lo = 0.0, t_hi = 0.0;
    bool nonnegative = true;
};

/// amplitude * b((x - xc)/hx) * b((t - tc)/ht) with b(y) = exp(1 - 1/(1 - y^2)).
TestFunction make_test_function(double xc, double hx, double tc, double ht, double amplitude = 1.0);

/// Support strictly inside the spatial domain and ending before the last time level.
void validate_support(const TestFunction& phi, const SpaceTime& st);

/// eta and its (R, u) derivatives, R = ln rho.
struct EntropyDerivs {
    double eta = 0.0, R = 0.0, u = 0.0, RR = 0.0, Ru = 0.0, uu = 0.0;
};

/// Conservative-variable derivatives of eta(rho, m).
struct ConservativeDerivs {
    double rho = 0.0, m = 0.0, rho_rho = 0.0, rho_m = 0.0, m_m = 0.0;
};
ConservativeDerivs to_conservative(const EntropyDerivs& d, double rho, double u);

/// Entropy pair generated by psi, tabulated on a (ln rho, u) box and interpolated by
/// bicubic convolution. Densities must stay below 1 (the kernel lives on R <= 0).
class EntropyPair {
public:
    struct Box {
        double rho_lo, rho_hi, u_lo, u_hi;
    };

    static EntropyPair tabulate(std::shared_ptr<const EntropyGenerator> gen, Box box, int nR = 40,
                                int nu = 40, const KernelConfig& cfg = {}, std::string name = {});
    /// Box spanning the realized states of st, widened by `pad` in ln rho and u.
    static Box realized_box(const SpaceTime& st, double pad = 0.02);

    double eta(double rho, double u) const;
    double q(double rho, double u) const;
    EntropyDerivs eta_derivs(double rho, double u) const;

    double exact_eta(double rho, double u) const;
    double exact_q(double rho, double u) const;

    /// Smallest eigenvalue of the (rho, m) Hessian of eta over a probe grid of the box.
    double convexity_certificate() const { return certificate_; }
    const Box& box() const { return box_; }
    const std::string& name() const { return name_; }
    void require_convex(double threshold = -1e-8) const;

private:
    std::shared_ptr<const EntropyGenerator> gen_;
    KernelConfig cfg_;
    Box box_{};
    std::string name_;
    double R0_ = 0.0, hR_ = 0.0, u0_ = 0.0, hu_ = 0.0;
    int nR_ = 0, nu_ = 0;
    std::vector<double> eta_, q_;
    double certificate_ = 0.0;

    void locate(double rho, double u, int& i, int& j, double& tR, double& tu) const;
};

/// Negated Gaussian generator psi(s) = -exp(-(s - c)^2 / (2 sigma^2)) sampled on c +- 8 sigma.
std::shared_ptr<const EntropyGenerator> gaussian_generator(double sigma, int samples = 801,
                                                           double center = 0.0);

struct ConservationResidual {
    double mass = 0.0, momentum = 0.0;
};

/// Integral of (rho phi_t + m phi_x) and (m phi_t + (m^2/rho + rho) phi_x) plus the initial line.
ConservationResidual conservation_residual(const SpaceTime& st, const TestFunction& phi);

/// Integral of (eta phi_t + q phi_x) plus the initial line, for a convex pair and phi >= 0.
double entropy_inequality_residual(const SpaceTime& st, const EntropyPair& pair,
                                   const TestFunction& phi);
std::vector<double> entropy_inequality_residuals(const SpaceTime& st, const EntropyPair& pair,
                                                 const std::vector<TestFunction>& phis);

/// Integral over t of (s [eta] - [q]) phi(x0 + s t, t) summed over the shocks of the fan.
double shock_entropy_production(const WaveFan& fan, const EntropyPair& pair,
                                const TestFunction& phi, double x0 = 0.0);

struct ThetaReport {
    double eps_eta_x_L2 = 0.0;   // || eps eta_x ||
    double quadratic_L1 = 0.0;   // || eps (eta'' U_x, U_x) ||
    double eps1_terms_L2 = 0.0;  // || eps2 u_x (q_m + eta_rho) - 2 eps2 rho_x eta_m / rho ||
};

/// Norms over the time levels inside [t_lo, t_hi] (the local window of the estimate).
ThetaReport theta_diagnostic(const SpaceTime& st, const EntropyPair& pair, const SolverConfig& cfg,
                             double t_lo = 0.0, double t_hi = INFINITY);

struct StrongConvergenceReport {
    std::vector<std::string> names;            // rho, m, m2_over_rho, W, Z
    std::vector<std::vector<double>> distances;  // per function, ||F_k - F_{k+1}||_1
    bool cauchy = false;                       // every row strictly decreasing
};

/// Final states of runs at eps, eps/2, eps/4, ... on one grid.
StrongConvergenceReport strong_convergence_diagnostic(const std::vector<SpaceTime>& runs);

}  // namespace isolab
