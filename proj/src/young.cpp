#include "isolab/young.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "isolab/errors.hpp"
#include "isolab/kernels.hpp"

namespace isolab {

namespace {

double gk(const Fn1& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    // relative tolerances below a few ulps are unreachable and only burn recursion depth
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12,
                                                                         std::max(tol, 1e-14), &err);
}

double raw_bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

double one_sided(const Fn1& f, double x, int side) {
    return f(x + side * 1e-9 * std::max(1.0, std::abs(x)));
}

}  // namespace

// ---------------------------------------------------------------------------
// measures and pairs

double Atom::rho() const { return std::sqrt(W * Z); }

double Atom::u() const {
    if (vacuum()) throw DomainError("velocity is undefined at the vacuum");
    return 0.5 * std::log(W / Z);
}

void DiscreteMeasure::validate() const {
    if (atoms.empty()) throw DomainError("measure has no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.W) || !std::isfinite(a.Z) || !std::isfinite(a.weight))
            throw DomainError("atom has a non-finite entry");
        if (a.W < 0.0 || a.Z < 0.0) throw DomainError("atom outside the quarter plane");
        if (a.weight < 0.0) throw DomainError("negative atom weight");
        if (a.W > W2 || a.Z > Z2) throw DomainError("atom outside [0, W2] x [0, Z2]");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("weights do not sum to 1");
}

PowerEntropyPair PowerEntropyPair::make(double B) {
    if (!(B > 1.0) || !std::isfinite(B)) throw DomainError("power pair needs B > 1");
    return {B, std::sqrt(B * (B - 1.0))};
}

double PowerEntropyPair::eta(double rho, double u) const {
    return rho == 0.0 ? 0.0 : std::pow(rho, B) * std::exp(A * u);
}

double PowerEntropyPair::q(double rho, double u) const {
    return rho == 0.0 ? 0.0 : -(A / (B - 1.0)) * std::pow(rho, B - 1.0) * std::exp(A * u);
}

EntropyFunctions PowerEntropyPair::functions() const {
    const PowerEntropyPair p = *this;
    return {[p](double r, double u) { return p.eta(r, u); },
            [p](double r, double u) { return p.q(r, u); }};
}

CompatibilityResidual compatibility_residual(const EntropyFunctions& pair, double rho, double u) {
    if (!(rho > 0.0)) throw DomainError("compatibility residual needs rho > 0");
    const double m = rho * u;
    auto eta = [&](double r, double mm) { return pair.eta(r, mm / r); };
    auto q = [&](double r, double mm) { return pair.q(r, mm / r); };
    const double h = 1e-6 * rho;
    const double eta_r = (eta(rho + h, m) - eta(rho - h, m)) / (2 * h);
    const double eta_m = (eta(rho, m + h) - eta(rho, m - h)) / (2 * h);
    const double q_r = (q(rho + h, m) - q(rho - h, m)) / (2 * h);
    const double q_m = (q(rho, m + h) - q(rho, m - h)) / (2 * h);
    return {q_r - eta_m * (1.0 - u * u), q_m - eta_r - 2.0 * u * eta_m};
}

double commutation_residual(const DiscreteMeasure& nu, const EntropyFunctions& p1,
                            const EntropyFunctions& p2) {
    double cross = 0.0, e1 = 0.0, e2 = 0.0, q1 = 0.0, q2 = 0.0;
    for (const auto& a : nu.atoms) {
        if (a.vacuum()) continue;
        const double r = a.rho(), u = a.u();
        const double h1 = p1.eta(r, u), f1 = p1.q(r, u);
        const double h2 = p2.eta(r, u), f2 = p2.q(r, u);
        cross += a.weight * (h1 * f2 - h2 * f1);
        e1 += a.weight * h1;
        e2 += a.weight * h2;
        q1 += a.weight * f1;
        q2 += a.weight * f2;
    }
    return cross - (e1 * q2 - e2 * q1);
}

DichotomyResult dichotomy_check(double alpha, double W, double Z, double B1, double B2) {
    const auto p1 = PowerEntropyPair::make(B1);
    const auto p2 = PowerEntropyPair::make(B2);
    if (B1 == B2) throw DomainError("dichotomy needs B1 != B2");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    const Atom P{W, Z, alpha};
    if (!std::isfinite(W) || !std::isfinite(Z) || P.vacuum() || W < 0.0 || Z < 0.0)
        throw DomainError("dichotomy atom must be off the vacuum");
    DiscreteMeasure nu;
    nu.atoms = {P, {0.0, 0.0, 1.0 - alpha}};
    DichotomyResult out;
    out.residual = commutation_residual(nu, p1.functions(), p2.functions());
    const double r = P.rho(), u = P.u();
    out.predicted = alpha * (1.0 - alpha) * std::pow(r, B1 + B2 - 1.0) * std::exp((p1.A + p2.A) * u) *
                    (std::sqrt(B1 / (B1 - 1.0)) - std::sqrt(B2 / (B2 - 1.0)));
    return out;
}

// ---------------------------------------------------------------------------
// mollifiers

Mollifier Mollifier::bump(double center, double half_width) {
    require_finite(center, "bump centre");
    if (!(half_width > 0.0) || center - half_width < -1.0 || center + half_width > 1.0)
        throw DomainError("bump support must lie in [-1, 1]");
    Mollifier m;
    m.center_ = center;
    m.width_ = half_width;
    m.lo_ = center - half_width;
    m.hi_ = center + half_width;
    m.breaks_ = {m.lo_, m.hi_};
    m.scale_ = 1.0 / (half_width * gk(raw_bump, -1.0, 1.0, 1e-15));

    constexpr int cells = 2048;
    m.table_h_ = (m.hi_ - m.lo_) / cells;
    m.cdf_.assign(cells + 1, 0.0);
    auto phi = [&m](double y) { return m.density(y); };
    for (int k = 0; k < cells; ++k) {
        const double x0 = m.lo_ + k * m.table_h_;
        m.cdf_[k + 1] = m.cdf_[k] +
                        boost::math::quadrature::gauss<double, 10>::integrate(phi, x0, x0 + m.table_h_);
    }
    m.mass_ = m.cdf_.back();
    return m;
}

Mollifier Mollifier::from_samples(std::vector<double> samples, bool normalize) {
    if (samples.size() < 3) throw DomainError("mollifier needs at least 3 samples");
    for (double v : samples) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("mollifier samples must be finite and >= 0");
    }
    if (samples.front() != 0.0 || samples.back() != 0.0)
        throw DomainError("mollifier samples must vanish at +-1");
    Mollifier m;
    m.sampled_ = true;
    const std::size_t n = samples.size();
    const double h = 2.0 / static_cast<double>(n - 1);
    m.breaks_.resize(n);
    for (std::size_t k = 0; k < n; ++k) m.breaks_[k] = -1.0 + static_cast<double>(k) * h;
    m.breaks_.back() = 1.0;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) total += 0.5 * h * (samples[k] + samples[k + 1]);
    if (!(total > 0.0)) throw DomainError("mollifier samples have zero mass");
    if (normalize) {
        for (double& v : samples) v /= total;
    } else if (std::abs(total - 1.0) > 1e-10) {
        throw DomainError("mollifier mass differs from 1");
    }
    m.samples_ = std::move(samples);
    m.table_h_ = h;
    m.cdf_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k)
        m.cdf_[k + 1] = m.cdf_[k] + 0.5 * h * (m.samples_[k] + m.samples_[k + 1]);
    m.mass_ = m.cdf_.back();
    return m;
}

double Mollifier::density(double y) const {
    if (!(y > lo_ && y < hi_)) return 0.0;
    if (!sampled_) return scale_ * raw_bump((y - center_) / width_);
    const double t = (y + 1.0) / table_h_;
    const auto k = std::min(static_cast<std::size_t>(t), samples_.size() - 2);
    const double s = t - static_cast<double>(k);
    return (1.0 - s) * samples_[k] + s * samples_[k + 1];
}

double Mollifier::operator()(double y) const { return density(y); }

double Mollifier::cdf(double y) const {
    if (y <= lo_) return 0.0;
    if (y >= hi_) return mass_;
    const double t = (y - lo_) / table_h_;
    const auto last = cdf_.size() - 2;
    const auto k = std::min(static_cast<std::size_t>(t), last);
    const double x0 = lo_ + static_cast<double>(k) * table_h_;
    const double d = y - x0;
    if (sampled_) {
        const double slope = (samples_[k + 1] - samples_[k]) / table_h_;
        return cdf_[k] + samples_[k] * d + 0.5 * slope * d * d;
    }
    // cubic Hermite with exact end derivatives
    const double h = table_h_, s = d / h;
    const double p0 = cdf_[k], p1 = cdf_[k + 1];
    const double m0 = density(x0) * h, m1 = density(x0 + h) * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * p1 +
           (s3 - s2) * m1;
}

double mollifier_integral(const Mollifier& phi, const Fn1& g, double a, double b,
                          const std::vector<double>& extra, double tol) {
    const double lo = std::max(a, phi.lo()), hi = std::min(b, phi.hi());
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts{lo, hi};
    for (double x : phi.breaks())
        if (x > lo && x < hi) cuts.push_back(x);
    for (double x : extra)
        if (x > lo && x < hi) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto f = [&](double y) { return phi(y) * g(y); };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += gk(f, cuts[k], cuts[k + 1], tol);
    return total;
}

MollifierCoefficients mollifier_coefficients(const Mollifier& outer, const Mollifier& inner) {
    auto below = [&](double y) { return inner.cdf(y); };
    auto above = [&](double y) { return inner.mass() - inner.cdf(y); };
    const auto& kinks = inner.breaks();
    MollifierCoefficients c;
    c.B_minus = mollifier_integral(outer, below, 0.0, 1.0, kinks, 1e-15);
    c.C_minus = mollifier_integral(outer, below, -1.0, 0.0, kinks, 1e-15);
    c.B_plus = mollifier_integral(outer, above, 0.0, 1.0, kinks, 1e-15);
    c.C_plus = mollifier_integral(outer, above, -1.0, 0.0, kinks, 1e-15);
    return c;
}

double compute_Y(const Mollifier& phi2, const Mollifier& phi3) {
    // integrand phi2(s2) phi3(s3) - phi2(s3) phi3(s2) over s3 < s2; the two products are
    // integrated in s3 separately so the inner quadratures never see a cancellation
    auto partial = [](const Mollifier& m, double s2) {
        std::vector<double> cuts{-1.0, s2};
        for (double x : m.breaks())
            if (x > -1.0 && x < s2) cuts.push_back(x);
        std::sort(cuts.begin(), cuts.end());
        double t = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            t += gk([&m](double s3) { return m(s3); }, cuts[k], cuts[k + 1], 1e-14);
        return t;
    };
    auto outer = [&](double s2) {
        const double a = phi2(s2), b = phi3(s2);
        return (a == 0.0 ? 0.0 : a * partial(phi3, s2)) - (b == 0.0 ? 0.0 : b * partial(phi2, s2));
    };
    std::vector<double> cuts{-1.0, 1.0};
    for (const auto* m : {&phi2, &phi3})
        for (double x : m->breaks()) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double Y = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) Y += gk(outer, cuts[k], cuts[k + 1], 1e-13);
    return Y;
}

// ---------------------------------------------------------------------------
// mollifier limits

std::vector<double> LimitTable::errors() const {
    std::vector<double> e(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) e[k] = std::abs(values[k] - limit);
    return e;
}

std::vector<double> default_eps_schedule() {
    std::vector<double> e;
    for (int k = 3; k <= 10; ++k) e.push_back(std::ldexp(1.0, -k));
    return e;
}

namespace {

// int_{lo}^{hi} g(s1) outer_eps(s1 - c) int_a^b F(s) inner_eps(s1 - s) ds ds1, scaled by eps
double nested(const Fn1& g, double lo, double hi, double c, const Mollifier& outer, const Fn1& F,
              double a, double b, const Mollifier& inner, double eps, double tol,
              const std::vector<double>& jumps) {
    auto inner_integral = [&](double s1) {
        auto h = [&](double y) { return F(s1 - eps * y); };
        return mollifier_integral(inner, h, (s1 - b) / eps, (s1 - a) / eps, {}, tol);
    };
    auto outer_fn = [&](double y1) {
        const double s1 = c + eps * y1;
        return g(s1) * inner_integral(s1);
    };
    std::vector<double> extra{0.0};
    for (double x : jumps) extra.push_back((x - c) / eps);
    // inner limits move across the inner mollifier's kinks
    for (double k : inner.breaks()) {
        extra.push_back((a + eps * k - c) / eps);
        extra.push_back((b + eps * k - c) / eps);
    }
    const double ylo = std::isfinite(lo) ? (lo - c) / eps : -2.0;
    const double yhi = std::isfinite(hi) ? (hi - c) / eps : 2.0;
    return mollifier_integral(outer, outer_fn, ylo, yhi, extra, tol);
}

void check_problem(const LimitProblem& p, const std::vector<double>& eps_seq) {
    if (!p.psi || !p.F || !p.f) throw DomainError("limit problem needs psi, F and f");
    if (!(p.a < p.b)) throw DomainError("limit problem needs a < b");
    if (!(p.a_prime < p.b_prime)) throw DomainError("limit problem needs a' < b'");
    for (std::size_t k = 0; k < eps_seq.size(); ++k) {
        if (!(eps_seq[k] > 0.0)) throw DomainError("eps must be positive");
        if (k > 0 && !(eps_seq[k] < eps_seq[k - 1])) throw DomainError("eps sequence must decrease");
    }
}

LimitTable sweep(const std::vector<double>& eps_seq, double limit, const std::function<double(double)>& value) {
    LimitTable t;
    t.eps = eps_seq;
    t.limit = limit;
    for (double e : eps_seq) t.values.push_back(value(e));
    return t;
}

}  // namespace

LimitTable mollifier_limit_I(const LimitProblem& p, const Mollifier& phi2, const Mollifier& phi3,
                             const std::vector<double>& eps_seq) {
    check_problem(p, eps_seq);
    const auto c = mollifier_coefficients(phi2, phi3);
    double bracket = 0.0;
    if (p.a > p.a_prime && p.a < p.b_prime) bracket = c.A_minus() * p.f(p.a);
    else if (p.a == p.a_prime) bracket = c.B_minus * one_sided(p.f, p.a_prime, +1);
    else if (p.a == p.b_prime) bracket = c.C_minus * one_sided(p.f, p.b_prime, -1);
    const double limit = bracket == 0.0 ? 0.0 : p.psi(p.a) * p.F(p.a) * bracket;
    auto g = [&](double s) { return p.psi(s) * p.f(s); };
    return sweep(eps_seq, limit, [&](double e) {
        return nested(g, p.a_prime, p.b_prime, p.a, phi2, p.F, p.a, p.b, phi3, e, p.tol, {});
    });
}

LimitTable mollifier_limit_J(const LimitProblem& p, const Mollifier& phi2, const Mollifier& phi3,
                             const std::vector<double>& eps_seq) {
    check_problem(p, eps_seq);
    const auto c = mollifier_coefficients(phi2, phi3);
    double bracket = 0.0;
    if (p.b > p.a_prime && p.b < p.b_prime) bracket = c.A_plus() * p.f(p.b);
    else if (p.b == p.a_prime) bracket = c.B_plus * one_sided(p.f, p.a_prime, +1);
    else if (p.b == p.b_prime) bracket = c.C_plus * one_sided(p.f, p.b_prime, -1);
    const double limit = bracket == 0.0 ? 0.0 : p.psi(p.b) * p.F(p.b) * bracket;
    auto g = [&](double s) { return p.psi(s) * p.f(s); };
    return sweep(eps_seq, limit, [&](double e) {
        return nested(g, p.a_prime, p.b_prime, p.b, phi2, p.F, p.a, p.b, phi3, e, p.tol, {});
    });
}

LimitTable mollifier_limit_K(const LimitProblem& p, const Mollifier& phi2, const Mollifier& phi3,
                             const std::vector<double>& eps_seq) {
    check_problem(p, eps_seq);
    // phi3 carries the Dirac centre, phi2 the convolution
    const auto c = mollifier_coefficients(phi3, phi2);
    double bracket = 0.0;
    if (p.alpha > p.a && p.alpha < p.b) bracket = p.f(p.alpha);
    else if (p.alpha == p.a)
        bracket = c.C_minus * one_sided(p.f, p.a, -1) + c.B_minus * one_sided(p.f, p.a, +1);
    else if (p.alpha == p.b)
        bracket = c.C_plus * one_sided(p.f, p.b, -1) + c.B_plus * one_sided(p.f, p.b, +1);
    const double limit = bracket == 0.0 ? 0.0 : p.psi(p.alpha) * p.F(p.alpha) * bracket;
    auto g = [&](double s) { return p.psi(s) * p.f(s); };
    const double inf = std::numeric_limits<double>::infinity();
    return sweep(eps_seq, limit, [&](double e) {
        return nested(g, -inf, inf, p.alpha, phi3, p.F, p.a, p.b, phi2, e, p.tol, {p.a, p.b});
    });
}

// ---------------------------------------------------------------------------
// D(R) and the support reduction

double D_of_R(double R) {
    require_finite(R, "R");
    return (-0.5 + 15.0 * std::abs(R) / 8.0) * std::exp(0.5 * R);
}

double D_of_R_step3(double R) {
    require_finite(R, "R");
    const auto d = eval_f_derivs(0.0);
    const double r = std::abs(R);
    return std::exp(0.5 * R) * (-0.5 * d.f + 2.0 * r + 2.0 * r * d.f1);
}

bool in_M_star(double Wp, double Zp, double Ws, double Zs) {
    return (Wp < Ws && Zp < 1.0 / Ws) || (Wp < 1.0 / Zs && Zp < Zs);
}

Verdict support_reduction_classify(const DiscreteMeasure& nu) {
    nu.validate();
    std::vector<int> off;
    for (std::size_t i = 0; i < nu.atoms.size(); ++i) {
        const auto& a = nu.atoms[i];
        if (a.weight > 0.0 && !a.vacuum()) off.push_back(static_cast<int>(i));
    }
    Verdict v;
    for (int i : off) {
        const auto& s = nu.atoms[static_cast<std::size_t>(i)];
        double integral = 0.0;
        int hit = -1;
        for (int j : off) {
            const auto& p = nu.atoms[static_cast<std::size_t>(j)];
            if (in_M_star(p.W, p.Z, s.W, s.Z)) {
                integral += p.weight * std::pow(p.W * p.Z, 0.25);
                if (hit < 0) hit = j;
            }
        }
        if (integral > 0.0) {
            v.kind = Verdict::Kind::violates_reduction;
            v.first = i;
            v.second = hit;
            v.reason = "atom " + std::to_string(hit) + " charges M* of atom " + std::to_string(i);
            return v;
        }
    }
    if (off.size() > 1) {
        v.kind = Verdict::Kind::violates_reduction;
        v.first = off[0];
        v.second = off[1];
        v.reason = "more than one atom off the vacuum";
        return v;
    }
    if (off.size() == 1) {
        const auto& p = nu.atoms[static_cast<std::size_t>(off[0])];
        v.alpha = p.weight;
        v.W = p.W;
        v.Z = p.Z;
        v.first = off[0];
    }
    v.reason = off.empty() ? "all mass at the vacuum" : "single atom plus vacuum";
    return v;
}

}  // namespace isolab
