#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace isolab {

enum class Boundary { periodic, constant_extension };
enum class TimeScheme { heun, forward_euler };

/// Parameters of the regularized system
///   rho_t + m_x = eps rho_xx + 2 eps2 u_x
///   m_t + (m^2/rho + rho)_x = eps m_xx + eps2 (u^2)_x + 2 eps2 (ln rho)_x
/// with eps1 = eps^r and eps2 = lambda eps1.
struct SolverConfig {
    double eps = 1e-2;
    double r = 1.5;
    double lambda = 1.0;
    double dx = 1.0 / 400;
    double x_min = -1.0;
    double domain_length = 2.0;
    double dt_factor = 0.4;
    double t_final = 0.1;
    Boundary bc = Boundary::periodic;
    TimeScheme scheme = TimeScheme::heun;
    /// Gaussian smoothing width of the initial data; unset means 2 dx
    std::optional<double> mollify_width;
    /// plateau radius of the dissipation weight
    double weight_R = 0.5;
    /// a run aborts when max w grows or min z drops by more than this
    double invariant_tol = 0.05;

    /// eps^r, fixed by finalize()
    double eps1 = 0.0;

    /// Validates the invariants and stores eps1. Throws DomainError.
    SolverConfig& finalize();
    double eps2() const { return lambda * eps1; }
    double dt() const { return dt_factor * dx * dx / (2.0 * eps); }
    int cells() const;
    double width() const { return mollify_width.value_or(2.0 * dx); }
};

struct Grid {
    double x_min = 0.0;
    double dx = 1.0;
    int n = 0;

    double x(int i) const { return x_min + (i + 0.5) * dx; }
};

Grid make_grid(const SolverConfig& cfg);

/// Sampled (rho0, u0) with the bounds M = sup rho0, u1 = sup |u0| and growth constant c0.
struct InitialData {
    std::vector<double> rho0;
    std::vector<double> u0;
    double c0 = 0.0;
    double M = 0.0;
    double u1 = 0.0;

    /// Computes M, u1 and the smallest admissible c0; validates the samples.
    static InitialData from_samples(std::vector<double> rho0, std::vector<double> u0);
    void validate() const;
};

InitialData sample_initial_data(const Grid& g, const std::function<double(double)>& rho,
                                const std::function<double(double)>& u);
/// Piecewise constant data with a jump at x_jump.
InitialData step_initial_data(const Grid& g, double rho_l, double u_l, double rho_r, double u_r,
                              double x_jump = 0.0);

struct Ghosts {
    double rho_l = 0.0, m_l = 0.0, rho_r = 0.0, m_r = 0.0;
};

struct GridState {
    double t = 0.0;
    std::vector<double> rho;
    std::vector<double> m;
    /// frozen exterior values used by the constant-extension boundary
    Ghosts ghosts;

    std::vector<double> u() const;
};

struct DissipationReport {
    double value = 0.0;
    double weight_R = 0.0;
};

struct StepDiagnostics {
    double t = 0.0;
    double dt = 0.0;
    double min_rho = 0.0;
    double x_min_rho = 0.0;
    double max_w = 0.0;
    double min_z = 0.0;
};

struct RunOptions {
    std::vector<double> output_times;
    bool store_every_step = false;
};

struct RunResult {
    Grid grid;
    double eps1 = 0.0;
    double eps2 = 0.0;
    std::vector<GridState> trajectory;
    std::vector<StepDiagnostics> steps;  // entry 0 describes the initial state
    DissipationReport dissipation;
};

/// Gaussian moving average of (rho0, u0) followed by the floor 2 eps2 on rho.
/// The data are multiplied by nothing: callers pass lambda * rho0 themselves.
std::pair<std::vector<double>, std::vector<double>> mollify_initial_data(const InitialData& data,
                                                                         const SolverConfig& cfg);

GridState initial_state(const InitialData& data, const SolverConfig& cfg);

/// One explicit step of size dt (cfg.dt() when omitted). Throws StabilityError when the
/// new density falls below 2 eps2 (1 - 1e-10).
GridState step(const GridState& s, const SolverConfig& cfg, std::optional<double> dt = {});

RunResult run(const InitialData& data, SolverConfig cfg, const RunOptions& opts = {});

/// Weight Psi: 1 on [-R, R], e^{-|x|} beyond 2R, cubic Hermite bridge in between.
double dissipation_weight(double x, double R);

struct PositivityCertificate {
    double margin = 0.0;  // min over steps and cells of rho - 2 eps2
    double t = 0.0;
    double x = 0.0;
    double floor = 0.0;   // 2 eps2
    bool ok = false;      // margin >= -1e-10 * floor
};

PositivityCertificate positivity_certificate(const RunResult& run);

struct InvariantReport {
    double w_max0 = 0.0, z_min0 = 0.0;
    double w_drift = 0.0;  // max_t max_x w - max_x w(0), clipped at 0
    double z_drift = 0.0;  // min_x z(0) - min_t min_x z, clipped at 0
};

InvariantReport invariant_report(const RunResult& run);

/// Sum of |E_t + D + J_x| Psi dx dt with forward differences; needs every step stored.
double energy_identity_residual(const RunResult& run, const SolverConfig& cfg);

}  // namespace isolab
