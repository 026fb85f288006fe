#pragma once

#include <functional>
#include <limits>
#include <cmath>
#include <string>
#include <vector>

#include "isolab/quadrature.hpp"

namespace isolab {

struct Atom {
    double W = 0.0, Z = 0.0, weight = 0.0;

    bool vacuum() const { return W * Z == 0.0; }
    double rho() const;
    /// undefined at the vacuum; throws DomainError there
    double u() const;
};

/// Finite atomic probability measure on the quarter plane W, Z >= 0.
struct DiscreteMeasure {
    std::vector<Atom> atoms;
    double W2 = std::numeric_limits<double>::infinity();
    double Z2 = std::numeric_limits<double>::infinity();

    /// Nonnegative coordinates and weights, weights summing to 1 within 1e-12, atoms in the box.
    void validate() const;
};

/// A pair of functions of (rho, u); weak pairs vanish at rho = 0.
struct EntropyFunctions {
    std::function<double(double, double)> eta, q;
};

/// eta = rho^B e^{A u}, q = -(A/(B-1)) rho^{B-1} e^{A u}, A = sqrt(B (B - 1)).
struct PowerEntropyPair {
    double B = 2.0;
    double A = std::sqrt(2.0);

    static PowerEntropyPair make(double B);
    double eta(double rho, double u) const;
    double q(double rho, double u) const;
    EntropyFunctions functions() const;
};

struct CompatibilityResidual {
    double q_rho = 0.0;  // q_rho - eta_m (1 - u^2)
    double q_m = 0.0;    // q_m - eta_rho - 2 u eta_m
};

/// Finite-difference residual of the flux relations in conservative variables at (rho, u).
CompatibilityResidual compatibility_residual(const EntropyFunctions& pair, double rho, double u);

/// <eta1 q2 - eta2 q1> - (<eta1><q2> - <eta2><q1>); vacuum atoms contribute 0.
double commutation_residual(const DiscreteMeasure& nu, const EntropyFunctions& p1,
                            const EntropyFunctions& p2);

struct DichotomyResult {
    double residual = 0.0;
    double predicted = 0.0;
};

/// Commutation residual of alpha delta_P + (1 - alpha) vacuum for two power pairs, and the
/// closed form alpha (1 - alpha) rho^{B1+B2-1} e^{(A1+A2) u} (sqrt(B1/(B1-1)) - sqrt(B2/(B2-1))).
DichotomyResult dichotomy_check(double alpha, double W, double Z, double B1, double B2);

/// Nonnegative density on (-1, 1) with unit mass and its distribution function.
class Mollifier {
public:
    /// exp(-1/(1 - x^2)) rescaled to (center - width, center + width), unit mass.
    static Mollifier bump(double center = 0.0, double half_width = 1.0);
    /// Piecewise linear through equally spaced samples on [-1, 1]; end samples must be 0.
    static Mollifier from_samples(std::vector<double> samples, bool normalize = true);

    double operator()(double y) const;
    /// integral of phi over (-1, y)
    double cdf(double y) const;
    double mass() const { return mass_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    /// support ends and interior kinks
    const std::vector<double>& breaks() const { return breaks_; }

private:
    bool sampled_ = false;
    double center_ = 0.0, width_ = 1.0, scale_ = 1.0;
    std::vector<double> samples_;
    double lo_ = -1.0, hi_ = 1.0, mass_ = 1.0;
    std::vector<double> breaks_;
    std::vector<double> cdf_;  // cumulative mass at breaks_ (samples) or on a fine table (bump)
    double table_h_ = 0.0;

    double density(double y) const;
};

/// Integral of phi(y) g(y) over [a, b] split at the mollifier's kinks and at `extra`.
double mollifier_integral(const Mollifier& phi, const Fn1& g, double a, double b,
                          const std::vector<double>& extra = {}, double tol = 1e-13);

/// One-sided coefficients with `outer` carrying the Dirac centre and `inner` the convolution:
///   B- = int_0^inf outer(y) int_{-inf}^y inner,  C- = int_{-inf}^0 outer(y) int_{-inf}^y inner,
///   B+ = int_0^inf outer(y) int_y^inf inner,     C+ = int_{-inf}^0 outer(y) int_y^inf inner.
struct MollifierCoefficients {
    double B_minus = 0.0, C_minus = 0.0, B_plus = 0.0, C_plus = 0.0;
    double A_minus() const { return B_minus + C_minus; }
    double A_plus() const { return B_plus + C_plus; }
};

MollifierCoefficients mollifier_coefficients(const Mollifier& outer, const Mollifier& inner);

/// Y = A-(phi2, phi3) - A-(phi3, phi2).
double compute_Y(const Mollifier& phi2, const Mollifier& phi3);

struct LimitTable {
    std::vector<double> eps;
    std::vector<double> values;
    double limit = 0.0;
    std::vector<double> errors() const;
};

struct LimitProblem {
    Fn1 psi, F, f;
    double a = 0.0, b = 1.0;  // inner integration interval
    double a_prime = 0.0, b_prime = 1.0;  // outer interval of I and J
    double alpha = 0.0;  // Dirac centre of K
    double tol = 1e-12;
};

/// int_{a'}^{b'} psi f phi2_eps(s1 - a) int_a^b F phi3_eps(s1 - s3) ds3 ds1
LimitTable mollifier_limit_I(const LimitProblem& p, const Mollifier& phi2, const Mollifier& phi3,
                             const std::vector<double>& eps_seq);
/// as I with the Dirac centre at b
LimitTable mollifier_limit_J(const LimitProblem& p, const Mollifier& phi2, const Mollifier& phi3,
                             const std::vector<double>& eps_seq);
/// int_R psi f phi3_eps(s1 - alpha) int_a^b F phi2_eps(s1 - s2) ds2 ds1, f may jump at a and b
LimitTable mollifier_limit_K(const LimitProblem& p, const Mollifier& phi2, const Mollifier& phi3,
                             const std::vector<double>& eps_seq);

/// eps in {2^-3, ..., 2^-10}
std::vector<double> default_eps_schedule();

/// (-1/2 + 15|R|/8) e^{R/2}
double D_of_R(double R);
/// e^{R/2} (-f(0)/2 + 2|R| + 2|R| f'(0)) with the series values at 0
double D_of_R_step3(double R);

struct Verdict {
    enum class Kind { dirac_plus_vacuum, violates_reduction } kind = Kind::dirac_plus_vacuum;
    double alpha = 0.0;
    double W = 0.0, Z = 0.0;  // the off-vacuum atom, (0, 0) when there is none
    int first = -1, second = -1;  // violating atom indices
    std::string reason;
};

/// True when (W', Z') lies in the region M* of the atom (W*, Z*), strict inequalities.
bool in_M_star(double Wp, double Zp, double Ws, double Zs);

Verdict support_reduction_classify(const DiscreteMeasure& nu);

}  // namespace isolab
