#pragma once

#include <utility>
#include <vector>

namespace isolab {

/// Left and right states of an isothermal Riemann problem (sound speed 1).
struct RiemannData {
    double rho_l = 1.0, u_l = 0.0, rho_r = 1.0, u_r = 0.0;
    void validate() const;
};

enum class WaveType { none, shock, rarefaction };

struct Wave {
    WaveType type = WaveType::none;
    /// fan edges; a shock has speed_lo == speed_hi
    double speed_lo = 0.0, speed_hi = 0.0;
};

struct WaveFan {
    RiemannData data;
    double rho_m = 1.0, u_m = 0.0;
    Wave wave1, wave2;
};

WaveFan solve_riemann(const RiemannData& data);

struct FanSample {
    double rho = 0.0, u = 0.0;
};

/// Self-similar solution at x/t = xi.
FanSample sample_fan(const WaveFan& fan, double xi);

/// max(|s[rho] - [rho u]|, |s[rho u] - [rho u^2 + rho]|)
double rankine_hugoniot_residual(double rho_a, double u_a, double rho_b, double u_b, double s);

/// Largest Rankine-Hugoniot residual over the shocks of the fan (0 without shocks).
double fan_rh_residual(const WaveFan& fan);

/// Density increases across each shock in the direction of its family and the
/// characteristic speeds converge into it.
bool fan_is_admissible(const WaveFan& fan);

/// (rho, u) at the cell centres xs at time t > 0 for a jump located at x0.
std::pair<std::vector<double>, std::vector<double>> sample_fan_on(const WaveFan& fan,
                                                                  const std::vector<double>& xs,
                                                                  double t, double x0 = 0.0);

}  // namespace isolab
