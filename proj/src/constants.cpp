#include "qlb/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlb/errors.hpp"

namespace qlb {

namespace {

constexpr double kE = 2.718281828459045235360287;
constexpr double kPi = 3.141592653589793238462643;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw RegimeError(what);
}

void require_radii(double inner, double outer, const char* names) {
    if (!(inner > 0.0 && inner < outer && std::isfinite(outer)))
        throw GeometryError(std::string("radii must satisfy ") + names);
}

double log_sum_exp(double a, double b) {
    if (a == -kInfinity) return b;
    if (b == -kInfinity) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_abs_dual(int d) {
    // log of (d/(d-2))^d · 2(d-2)/(√d-√(d-2))^2, shared by the upper and sublinear Harnack constants
    const double dd = d;
    return dd * std::log(dd / (dd - 2.0)) + std::log(2.0 * (dd - 2.0)) -
           2.0 * std::log(std::sqrt(dd) - std::sqrt(dd - 2.0));
}

double moser_bracket(int d, double p, double lambda, double q, double rho) {
    const double dd = d;
    const double m = std::max((dd - 2.0) / ((dd * q) * (dd * q)) * std::fabs(dd * q - (dd - 2.0)), 0.25);
    return lambda_p(p, lambda) + (dd - 2.0) / q + (1.0 - rho) * (1.0 - rho) * m;
}

double log_k1_from_r(double r, int d) {
    return std::log(young_K1(r, d));
}

// rd/(2r-d) with its r = ∞ limit d/2.
double rd_ratio(double r, int d) {
    if (std::isinf(r)) return d / 2.0;
    return r * d / (2.0 * r - d);
}

void check_r(double r, int d) {
    if (!(r > d / 2.0)) throw RegimeError("integrability exponent r must exceed d/2");
}

}  // namespace

double sobolev_default(int d) {
    if (d < 3) throw RegimeError("dimension must be at least 3");
    const double dd = d;
    const double log_s = -0.5 * std::log(kPi * dd * (dd - 2.0)) +
                         (log_gamma(dd) - log_gamma(dd / 2.0)) / dd;
    return std::exp(log_s);
}

double sobolev_constant(int d, std::optional<double> override_value) {
    if (override_value) {
        if (!(*override_value > 0.0) || !std::isfinite(*override_value))
            throw DomainError("Sobolev constant override must be positive and finite");
        return *override_value;
    }
    return sobolev_default(d);
}

double beta_n(int d, double p, double q, int n) {
    const double dd = d;
    const double pp = positive_part(p - 1.0);
    return std::pow(dd / (dd - 2.0), n - 1) * (q - q_bar(d, p)) + pp * (dd - 2.0) / 2.0;
}

C1Result c1_and_k0(int d, double p, double q) {
    if (d < 3) throw RegimeError("dimension must be at least 3");
    const double qb = q_bar(d, p);
    if (!(q > qb)) throw RegimeError("q must exceed d(p-1)_+/2 = " + fmt(qb));
    const double dd = d;
    C1Result out;
    if (q > dd / (dd - 2.0)) {
        out.c1 = (dd - 2.0) * q / ((dd - 2.0) * q - dd);
        return out;
    }
    const double pp = positive_part(p - 1.0);
    const double two_star = 2.0 * dd / (dd - 2.0);
    const double a = std::log((two_star - dd * pp) / (2.0 * q - dd * pp)) / std::log(dd / (dd - 2.0));
    out.log_ratio = a;
    if (std::fabs(a - std::round(a)) < kIntegerTol) {
        out.admissible = false;
        out.k0 = static_cast<int>(std::round(a));
        out.c1 = kInfinity;
        return out;
    }
    const int k0 = static_cast<int>(std::floor(a));
    out.k0 = k0;
    double c1 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double x = std::pow(dd / (dd - 2.0), k0 - 1 + i) * (q - qb) + pp * (dd - 2.0) / 2.0;
        c1 = std::max(c1, x / std::fabs(x - 1.0));
    }
    out.c1 = c1;
    return out;
}

NudgeResult nudge_q(int d, double p, double q) {
    const double qb = q_bar(d, p);
    if (!(q > qb)) throw RegimeError("q must exceed d(p-1)_+/2 = " + fmt(qb));
    if (c1_and_k0(d, p, q).admissible) return {q, false};
    for (int k = 52; k >= 0; --k) {
        const double cand = q * (1.0 - std::ldexp(1e-3, -k));
        if (cand >= q || !(cand > qb)) continue;
        if (c1_and_k0(d, p, cand).admissible) return {cand, true};
    }
    // The grid stops at q(1 - 1e-3); fall back to bisection towards q̄.
    double cand = 0.5 * (q + qb);
    for (int it = 0; it < 200; ++it) {
        if (c1_and_k0(d, p, cand).admissible) return {cand, true};
        cand = 0.5 * (cand + q);
    }
    throw RegimeError("no admissible exponent found below q = " + fmt(q));
}

ConstantValue upper_I_inf(const ProblemParams& params, double rho, double q, double s2) {
    validate(params);
    if (!(rho > 0.0 && rho < 1.0)) throw GeometryError("rho = R_inf/R0 must lie in (0,1)");
    const C1Result c = c1_and_k0(params.d, params.p, q);
    if (!c.admissible)
        throw RegimeError("q = " + fmt(q) + " makes the iteration index an integer; nudge it first");
    const double dd = params.d;
    const double pm1 = params.p - 1.0;
    const double pp = positive_part(pm1);
    // ω exponent 2(p-1)_+/(d(p-1)) with x_+/x = 0 at x = 0
    const double omega_exp = pp > 0.0 ? 2.0 / dd : 0.0;
    const double e = dd / (2.0 * q - dd * pp);
    const double first = std::log(c.c1) + 2.0 * std::log(s2) + omega_exp * log_omega(dd) -
                         2.0 * std::log(1.0 - rho);
    const double second = log_abs_dual(params.d) + std::log(moser_bracket(params.d, params.p, params.lambda, q, rho));
    ConstantValue v;
    v.name = "I_inf_q";
    v.log_value = e * (first + second);
    v.regime = params.p <= 1.0 ? "0<=p<=1" : "p>1, q>d(p-1)/2";
    v.anchor = "Local upper estimates: explicit constant I_inf,q";
    v.echo = {{"d", dd}, {"p", params.p}, {"lambda", params.lambda}, {"q", q}, {"rho", rho},
              {"c1", c.c1}, {"S2", s2}};
    return v;
}

ConstantValue caccioppoli_rhs(int d, double R0, double R) {
    require_radii(R, R0, "0 < R < R0");
    ConstantValue v;
    v.name = "caccioppoli_rhs";
    v.log_value = std::log(8.0) + log_omega(d) + d * std::log(R0) - 2.0 * std::log(R0 - R);
    v.regime = "p>=0";
    v.anchor = "Quantitative Caccioppoli estimates";
    v.echo = {{"d", double(d)}, {"R0", R0}, {"R", R}};
    return v;
}

double young_K1(double r, int d) {
    if (d < 3) throw RegimeError("dimension must be at least 3");
    check_r(r, d);
    const double dd = d;
    if (std::isinf(r)) return 2.0 / dd * std::pow(dd / (dd - 2.0), (dd - 2.0) / 2.0);
    const double a = dd + r * (dd - 2.0);
    const double e = a / (2.0 * r - dd);
    return (2.0 * r - dd) / (r * dd) * std::exp(e * std::log(r * dd / a));
}

ConstantValue reverse_poincare_K2(double alpha, double r, int d, double R, double b_norm,
                                  const CutoffSup& phi, double s2) {
    if (!(alpha > 0.0)) throw RegimeError("alpha must be positive");
    check_r(r, d);
    if (!(R > 0.0)) throw GeometryError("R must be positive");
    if (b_norm < 0.0) throw DomainError("b norm must be nonnegative");
    const double dd = d;
    const double rd = rd_ratio(r, d);
    const double s_exp = std::isinf(r) ? dd - 2.0 : 2.0 * (dd + r * (dd - 2.0)) / (2.0 * r - dd);
    const double two_over_star = (dd - 2.0) / dd;
    double log_bracket = std::log(2.0 * phi.sup_phi * phi.sup_lap + phi.sup_grad * phi.sup_grad);
    if (b_norm > 0.0) {
        const double lb = s_exp * std::log(s2) + rd * std::log((alpha + 1.0) * (alpha + 1.0) / (2.0 * alpha)) +
                          log_k1_from_r(r, d) + 2.0 * std::log(phi.sup_phi) +
                          two_over_star * (log_omega(dd) + dd * std::log(R)) + rd * std::log(b_norm);
        log_bracket = log_sum_exp(log_bracket, lb);
    }
    ConstantValue v;
    v.name = "K2";
    v.log_value = std::log((alpha + 1.0) / alpha) + log_bracket;
    v.regime = "alpha>0, r>d/2";
    v.anchor = "Reverse Poincare inequality for subsolutions";
    v.echo = {{"alpha", alpha}, {"r", r}, {"d", dd}, {"R", R}, {"b_norm", b_norm}, {"S2", s2}};
    return v;
}

ConstantValue moser_K3(double q, double r, int d, double R0, double R_inf, double b_norm, double s2) {
    if (!(q > 1.0)) throw RegimeError("Moser iteration needs q > 1");
    check_r(r, d);
    require_radii(R_inf, R0, "0 < R_inf < R0");
    const double dd = d;
    const double rd = rd_ratio(r, d);
    const double gap = R0 - R_inf;
    // (2r-d)/(rd) and rd/(d+r(d-2)) with their r = ∞ limits 2/d and d/(d-2)
    const double pre = std::isinf(r) ? 2.0 / dd : (2.0 * r - dd) / (r * dd);
    const double inner = std::isinf(r) ? dd / (dd - 2.0) : r * dd / (dd + r * (dd - 2.0));
    double log_bracket = std::log(8.0 * q * (dd + 2.0) / (q - 1.0) + (gap / R_inf) * (gap / R_inf));
    if (b_norm > 0.0) {
        const double lb = rd * std::log(s2 * s2 / 2.0) + std::log(pre) +
                          (1.0 + rd) * std::log(q / (q - 1.0) * inner) + 2.0 * std::log(gap) +
                          (dd - 2.0) / dd * (log_omega(dd) + dd * std::log(R0)) + rd * std::log(b_norm);
        log_bracket = log_sum_exp(log_bracket, lb);
    }
    const double lead = rd * dd / (2.0 * q) * (std::log(q) + dd * std::log(dd / 2.0));
    ConstantValue v;
    v.name = "K3";
    v.log_value = lead + dd / (2.0 * q) * log_bracket;
    v.regime = std::isinf(r) ? "q>1, bounded coefficient" : "q>1, r>d/2";
    v.anchor = "Moser iteration constant K3_q[b]";
    v.echo = {{"q", q}, {"r", r}, {"d", dd}, {"R0", R0}, {"R_inf", R_inf}, {"b_norm", b_norm}, {"S2", s2}};
    return v;
}

double degiorgi_c(double alpha, double lam, double theta) {
    if (!(alpha > 0.0)) throw RegimeError("alpha must be positive");
    if (!(theta >= 0.0 && theta < 1.0)) throw RegimeError("theta must lie in [0,1)");
    const double lo = std::pow(theta, 1.0 / alpha);
    if (!(lam > lo && lam < 1.0)) throw RegimeError("lambda must lie in (theta^{1/alpha}, 1)");
    return 1.0 / (std::pow(1.0 - lam, alpha) * (1.0 - theta / std::pow(lam, alpha)));
}

ConstantValue extension_constant(double q_over, double q_under, double q0, double gamma, double K,
                                 double R0, double R_inf) {
    if (!(q0 > 0.0 && q0 <= q_under && q_under < q_over)) throw RegimeError("need 0 < q0 <= q_under < q_over");
    if (!(gamma > 0.0)) throw RegimeError("gamma must be positive");
    if (!(K > 0.0)) throw DomainError("K must be positive");
    require_radii(R_inf, R0, "0 < R_inf < R0");
    double two_exp = 0.0;
    double e = 0.0;
    if (std::isinf(q_over)) {
        two_exp = (q_under - q0) / q0;
        e = q_under / q0;
    } else {
        two_exp = q_over * (q_under - q0) / (q0 * (q_over - q_under));
        e = q_under * (q_over - q0) / (q0 * (q_over - q_under));
    }
    ConstantValue v;
    v.name = "extension";
    v.log_value = std::log(3.0) + two_exp * std::log(2.0) +
                  e * (gamma * std::log(4.0 * gamma * e) + std::log(K) - gamma * std::log(R0 - R_inf));
    v.regime = "0<q0<=q_under<q_over";
    v.anchor = "Extending local upper bounds";
    v.echo = {{"q_over", q_over}, {"q_under", q_under}, {"q0", q0}, {"gamma", gamma}, {"K", K},
              {"R0", R0}, {"R_inf", R_inf}};
    return v;
}

AConstants a_constants(double q0, double r, int d, double R, double R_inf, double s2) {
    if (!(q0 > 0.0)) throw RegimeError("q0 must be positive");
    check_r(r, d);
    require_radii(R_inf, R, "0 < R_inf < R");
    const double dd = d;
    const double rd = rd_ratio(r, d);
    const double gap = R - R_inf;
    const double pre = std::isinf(r) ? 2.0 / dd : (2.0 * r - dd) / (r * dd);
    const double inner = std::isinf(r) ? dd / (dd - 2.0) : r * dd / (dd + r * (dd - 2.0));
    // rd²/(2(2r-d)q0) = (rd/(2r-d))·d/(2q0)
    const double a1_exp = rd * dd / (2.0 * q0);
    AConstants a;
    a.superlinear_branch = q0 > 1.0;
    const double qq = a.superlinear_branch ? q0 : q0 + 1.0;
    const double ratio = a.superlinear_branch ? q0 / (q0 - 1.0) : (q0 + 1.0) / q0;
    if (a.superlinear_branch) {
        a.log_A1 = a1_exp * (std::log(q0) + dd * std::log(dd / 2.0));
    } else {
        a.log_A1 = std::log(3.0) + (2.0 * dd + 1.0) / q0 * std::log(2.0) + dd / q0 * std::log(dd / q0) +
                   a1_exp * (std::log(qq) + dd * std::log(dd / 2.0));
    }
    a.log_A2 = std::log(8.0 * ratio * (dd + 2.0) + (gap / R_inf) * (gap / R_inf));
    a.log_A3 = rd * std::log(s2 * s2 / 2.0) + std::log(pre) + (1.0 + rd) * std::log(ratio * inner) +
               2.0 * std::log(gap) + (dd - 2.0) / dd * (log_omega(dd) + dd * std::log(R));
    return a;
}

SecondForm unbounded_coefficient_bracket(int d, double R_inf, double R0, double R, double q0, double r,
                                         double b_norm, double s2) {
    require_radii(R_inf, R0, "0 < R_inf < R0");
    if (R < R0) throw GeometryError("enclosing radius R must be at least R0");
    if (b_norm < 0.0) throw DomainError("b norm must be nonnegative");
    SecondForm out;
    out.a = a_constants(q0, r, d, R, R_inf, s2);
    const double lb = b_norm > 0.0 ? out.a.log_A3 + rd_ratio(r, d) * std::log(b_norm) : -kInfinity;
    out.log_bracket = log_sum_exp(out.a.log_A2, lb);
    out.log_multiplier = out.a.log_A1 - d / q0 * std::log(R0 - R_inf) + d / (2.0 * q0) * out.log_bracket;
    return out;
}

SecondForm second_form_bracket(const ProblemParams& params, double R_inf, double R0, double R, double q0,
                               double r_over, double u_norm, double s2) {
    validate(params);
    require(params.p > 1.0, "second form needs p > 1");
    const double dd = params.d;
    const double pm1 = params.p - 1.0;
    const double qb = dd * pm1 / 2.0;
    if (!(r_over > qb)) throw RegimeError("r_over must exceed d(p-1)/2 = " + fmt(qb));
    if (u_norm < 0.0) throw DomainError("norm must be nonnegative");
    require_radii(R_inf, R0, "0 < R_inf < R0");
    if (R < R0) throw GeometryError("enclosing radius R must be at least R0");
    SecondForm out;
    const double r = std::isinf(r_over) ? kInfinity : r_over / pm1;
    out.a = a_constants(q0, r, params.d, R, R_inf, s2);
    if (std::isinf(r_over)) {
        out.lambda_exponent = dd / 2.0;
        out.norm_exponent = dd * pm1 / 2.0;
    } else {
        const double den = 2.0 * r_over - dd * pm1;
        out.lambda_exponent = dd * pm1 / den;
        out.norm_exponent = dd * pm1 * r_over / den;
    }
    const double lb = u_norm > 0.0 ? out.a.log_A3 + out.lambda_exponent * std::log(params.lambda) +
                                         out.norm_exponent * std::log(u_norm)
                                   : -kInfinity;
    out.log_bracket = log_sum_exp(out.a.log_A2, lb);
    out.log_multiplier = out.a.log_A1 - dd / q0 * std::log(R0 - R_inf) + dd / (2.0 * q0) * out.log_bracket;
    return out;
}

JohnNirenberg jn_constants(int d, double diam, double vol, double kappa2) {
    const double dd = d;
    if (!(kappa2 > (dd - 1.0) * kE)) throw RegimeError("kappa2 must exceed (d-1)e");
    if (!(diam > 0.0 && vol > 0.0)) throw GeometryError("diameter and volume must be positive");
    JohnNirenberg j;
    j.kappa0 = dd * vol * kappa2 / std::pow(diam, dd);
    j.kappa1 = omega(dd) * std::pow(diam, dd) * (kappa2 + kE) / (kappa2 - (dd - 1.0) * kE);
    // Moser-Trudinger constant with exponent p = d
    j.kappa3 = vol + std::pow(diam, dd) / std::sqrt(2.0 * kPi) * dd * kE * omega(dd) / (kappa2 - (dd - 1.0) * kE);
    return j;
}

double q0_threshold(double d, double eps) {
    if (!(d >= 1.0)) throw DomainError("dimension must be at least 1");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    const double w = omega(d);
    return std::pow(2.0, (d - 3.0) / 2.0) / (d * w * w * (kE * (d - 1.0) + eps));
}

double q0_threshold_pc(int d) {
    const double dd = d;
    const double w = omega(dd);
    return std::pow(2.0, (dd - 3.0) / 2.0) / (dd * dd * w * w * kE);
}

ConstantValue lower_I(int d, double q, double eps, double R0, double R_inf, double s2) {
    if (d < 3) throw RegimeError("dimension must be at least 3");
    const double q0 = q0_threshold(d, eps);
    if (!(q > 0.0 && q <= q0 * (1.0 + 1e-12)))
        throw RegimeError("lower exponent must lie in (0, q0] with q0 = " + fmt(q0));
    require_radii(R_inf, R0, "0 < R_inf < R0");
    const double dd = d;
    const double gap = R0 - R_inf;
    const double geo = dd * R0 * R0 / (gap * gap) + R0 * R0 / (R_inf * R_inf);
    const double first = dd * std::log(2.0) + 2.0 * std::log(s2) + std::log(geo);
    const double second = std::log(eps) - dd * std::log(2.0) - std::log(kE * dd + eps) - 0.5 * log_omega(dd);
    ConstantValue v;
    v.name = "I_minus_inf_q";
    v.log_value = -dd / (2.0 * q) * first + 2.0 / q * second;
    v.regime = "0<=p<p_s, 0<q<=q0(d,eps)";
    v.anchor = "Local lower estimates: explicit constant I_-inf,q";
    v.echo = {{"d", dd}, {"q", q}, {"eps", eps}, {"R0", R0}, {"R_inf", R_inf}, {"q0", q0}, {"S2", s2}};
    return v;
}

ConstantValue rev_holder_I(int d, double p, double q_over, double q0, double R_bar, double R0, double s2,
                           RevHolderForm form) {
    if (d < 3) throw RegimeError("dimension must be at least 3");
    const double dd = d;
    const double lo = dd * (p - 1.0) / 2.0;
    const double hi = dd / (dd - 2.0);
    if (!(p > 1.0 && p < hi)) throw RegimeError("reverse Holder constant needs 1 < p < d/(d-2)");
    if (!(q_over > lo && q_over < hi)) throw RegimeError("q_over must lie in (d(p-1)/2, d/(d-2))");
    if (!(q0 > 0.0 && q0 <= q_over)) throw RegimeError("q0 must lie in (0, q_over]");
    require_radii(R_bar, R0, "0 < R_bar < R0");
    const double two_star = 2.0 * dd / (dd - 2.0);
    const double gap = R0 - R_bar;
    const double s22 = s2 * s2;
    const double lead = 2.0 * dd * q_over * s22 / (two_star - 2.0 * q_over);
    ConstantValue v;
    v.name = "I_qbar_q0";
    v.anchor = form == RevHolderForm::PcRange ? "Reverse Holder inequalities for 1<p<p_c"
                                                  : "Local lower estimates when 1<p<p_c";
    if (q0 >= (dd - 2.0) / dd * q_over) {
        v.regime = "upper branch: (d-2)q_over/d <= q0 <= q_over";
        v.log_value = two_star / (2.0 * q_over) * std::log(lead + s22 * gap * gap / (R_bar * R_bar)) +
                      two_star / q_over * (log_omega(dd) / dd + std::log(R0 / gap)) +
                      dd / q_over * std::log(R0 / R_bar);
    } else {
        v.regime = "lower branch: q0 < (d-2)q_over/d";
        const double tail = form == RevHolderForm::PcRange ? dd / q0 * std::log(R_bar / R0)
                                                               : dd / q_over * std::log(R0 / R_bar);
        v.log_value = std::log(3.0) + ((dd - 2.0) * q_over / (2.0 * q0) - dd / 2.0) * std::log(2.0) +
                      (q_over - q0) / (q_over * q0) * dd / 2.0 *
                          std::log(lead * R_bar * R_bar / (gap * gap) + s22) +
                      (dd / q0 - dd / q_over) *
                          std::log(4.0 * std::exp(log_omega(dd) / dd) * (q_over - q0) / (q0 * q_over)) +
                      tail;
    }
    v.echo = {{"d", dd}, {"p", p}, {"q_over", q_over}, {"q0", q0}, {"R_bar", R_bar}, {"R0", R0}, {"S2", s2}};
    return v;
}

std::string to_string(HarnackRegime r) {
    switch (r) {
        case HarnackRegime::Sublinear: return "sublinear";
        case HarnackRegime::Subcritical: return "subcritical";
        case HarnackRegime::General: return "general";
    }
    return "unknown";
}

ExponentWindow harnack_window(const ProblemParams& params, const ExponentWindow& hint) {
    validate(params);
    const CriticalExponents ce = critical_exponents(params.d, params.p);
    const double dd = params.d;
    ExponentWindow w = hint;
    if (params.p <= 1.0) return w;
    if (params.p >= ce.p_s) throw RegimeError("Harnack constants need p < p_s");
    const double qb = dd * (params.p - 1.0) / 2.0;
    if (params.p < ce.p_c) {
        const double qo = hint.q_over.value_or(0.5 * (qb + ce.p_c));
        if (!(qo > qb && qo < ce.p_c)) throw RegimeError("q_over must lie in (d(p-1)/2, d/(d-2))");
        w.q_over = nudge_q(params.d, params.p, qo).q;
        const double qu = hint.q_under.value_or(std::min(q0_threshold_pc(params.d), *w.q_over));
        if (!(qu > 0.0 && qu <= std::min(q0_threshold_pc(params.d), *w.q_over) * (1.0 + 1e-12)))
            throw RegimeError("q_under must lie in (0, min(q0, q_over)]");
        w.q_under = qu;
        return w;
    }
    const double qo = hint.q_over.value_or(params.p + 1.0);
    if (!(qo > qb)) throw RegimeError("q_over must exceed d(p-1)/2");
    w.q_over = nudge_q(params.d, params.p, qo).q;
    w.q_under = hint.q_under.value_or(q0_threshold(dd, hint.eps));
    return w;
}

namespace {

HarnackValue sublinear_harnack(const ProblemParams& params, const RadiiChain& chain, double s2) {
    const double dd = params.d;
    const double R0 = chain.r0;
    const double Ri = chain.r_inf;
    const double gap = R0 - Ri;
    const double w2 = std::exp(2.0 * log_omega(dd));
    const double base = std::pow(2.0, (dd - 3.0) / 2.0) / (dd * w2);
    const double ln_ratio = std::log(dd / (dd - 2.0));
    const double L = std::log(kE * (dd - 1.0) / base) / ln_ratio;

    HarnackValue h;
    h.regime = HarnackRegime::Sublinear;
    h.anchor = "Harnack inequality, 0<=p<=1";
    const int n_statement = static_cast<int>(std::floor(L + 1.5));
    // first integer n with ε(n) = (d/(d-2))^{n-1/2}·base - e(d-1) > 0
    int n = std::max(0, static_cast<int>(std::floor(L + 0.5)) - 1);
    while (!(std::pow(dd / (dd - 2.0), n - 0.5) * base - kE * (dd - 1.0) > 0.0)) ++n;
    h.n0 = n;
    h.n0_statement = n_statement;
    if (n != n_statement)
        h.warnings.push_back("n0 from the statement (" + std::to_string(n_statement) +
                             ") differs from the first integer with eps(n)>0 (" + std::to_string(n) + ")");
    const double Q = std::pow(dd / (dd - 2.0), n - 0.5) * base;
    const double q0 = std::pow((dd - 2.0) / dd, n - 0.5);
    h.eps = Q - kE * (dd - 1.0);
    h.q0 = q0;
    h.q_over = q0;
    h.q_under = q0;

    const double t1 = dd * std::log(2.0) + 4.0 * std::log(s2) + 2.0 * std::log(R0 / gap) +
                      std::log(dd * R0 * R0 / (gap * gap) + R0 * R0 / (Ri * Ri));
    const double t2 = dd * std::log(2.0) + std::log(Q + kE) + 0.5 * log_omega(dd) - std::log(Q - kE * (dd - 1.0));
    const double m = std::max((dd - 2.0) / ((dd * q0) * (dd * q0)) * std::fabs(dd * q0 - (dd - 2.0)), 0.25);
    const double inner = lambda_p(params.p, params.lambda) + (dd - 2.0) / q0 + gap * gap / (Ri * Ri) * m;
    const double t3 = dd * ln_ratio + std::log(2.0 * (dd - 2.0) * std::sqrt(dd)) -
                      3.0 * std::log(std::sqrt(dd) - std::sqrt(dd - 2.0)) + std::log(inner);
    h.log_value = dd / (2.0 * q0) * t1 + 2.0 / q0 * t2 + dd / (2.0 * q0) * t3;
    return h;
}

}  // namespace

HarnackValue harnack_constant(const ProblemParams& params, const RadiiChain& chain,
                              const ExponentWindow& window, const std::optional<HarnackNorms>& norms,
                              double s2) {
    validate(params);
    validate(chain);
    const CriticalExponents ce = critical_exponents(params.d, params.p);
    if (params.p >= ce.p_s) throw RegimeError("Harnack constants need p < p_s");
    if (params.p <= 1.0) return sublinear_harnack(params, chain, s2);

    const ExponentWindow w = harnack_window(params, window);
    const double dd = params.d;
    const double pm1 = params.p - 1.0;
    const double qo = *w.q_over;
    const double qu = *w.q_under;
    HarnackValue h;
    h.q_over = qo;
    h.q_under = qu;

    if (params.p < ce.p_c) {
        const double R_bar = chain.r_bar.value_or(0.5 * (chain.r_inf + chain.r0));
        require_radii(chain.r_inf, R_bar, "R_inf < R_bar");
        require_radii(R_bar, chain.r0, "R_bar < R0");
        h.regime = HarnackRegime::Subcritical;
        h.anchor = "Harnack inequalities when 1<p<p_c";
        const double ui = upper_I_inf(params, chain.r_inf / R_bar, qo, s2).log_value;
        const double li = lower_I(params.d, qu, kE, chain.r0, chain.r_inf, s2).log_value;
        const double ri = rev_holder_I(params.d, params.p, qo, qu, R_bar, chain.r0, s2,
                                       RevHolderForm::LowerBound).log_value;
        h.log_I_upper = ui;
        h.log_I_lower = li;
        h.log_I_rev = ri;
        h.eps = kE;
        h.q0 = q0_threshold_pc(params.d);
        h.log_value = ui + 2.0 * qo / (2.0 * qo - dd * pm1) * (ri - li);
        return h;
    }

    if (!norms) throw RegimeError("the Harnack constant for p_c <= p < p_s depends on norms of u; none supplied");
    h.regime = HarnackRegime::General;
    h.anchor = "Harnack inequality for 0<=p<p_s";
    const double ui = upper_I_inf(params, chain.rho(), qo, s2).log_value;
    const double li = lower_I(params.d, qu, w.eps, chain.r0, chain.r_inf, s2).log_value;
    h.log_I_upper = ui;
    h.log_I_lower = li;
    h.eps = w.eps;
    h.q0 = q0_threshold(dd, w.eps);
    // the free exponent of the first mean is taken equal to q̄
    const double quot = pm1 / qo * norms->log_mean_q_over_R0 - norms->log_mean_pm1_Rinf;
    h.log_value = ui - li + dd / (2.0 * qo - dd * pm1) * quot + norms->log_mean_q_over_R0 / qo -
                  norms->log_mean_q_under_R0 / qu;
    return h;
}

AbsoluteBounds absolute_bounds(const ProblemParams& params, const RadiiChain& chain,
                               const ExponentWindow& window, double s2) {
    validate(params);
    validate(chain);
    const CriticalExponents ce = critical_exponents(params.d, params.p);
    AbsoluteBounds out;
    const bool upper = params.p > 1.0 && params.p < ce.p_c;
    const bool lower = params.p >= 0.0 && params.p < 1.0;
    if (!upper && !lower) {
        out.reason = "No";
        return out;
    }
    const double dd = params.d;
    const double R0 = chain.r0;
    const double R = chain.r_inf;
    const HarnackValue h = harnack_constant(params, chain, window, std::nullopt, s2);
    out.harnack = h;
    // log of 8R0^d/(λ(R0-R)^2 R^d)
    const double core = std::log(8.0) + dd * std::log(R0) - std::log(params.lambda) - 2.0 * std::log(R0 - R) -
                        dd * std::log(R);
    if (upper) {
        out.log_upper = h.log_value + core / (params.p - 1.0);
        out.reason = "upper, 1<p<p_c";
    } else {
        out.log_lower = -h.log_value - core / (1.0 - params.p);
        out.reason = "lower, 0<=p<1";
    }
    return out;
}

double log_bp_bound(const ProblemParams& params, const RadiiChain& chain, std::optional<double> log_harnack,
                    std::optional<double> sup_norm) {
    validate(params);
    validate(chain);
    const CriticalExponents ce = critical_exponents(params.d, params.p);
    if (params.p >= ce.p_s) throw RegimeError("gradient bounds need p < p_s");
    if (params.p == 1.0) return 0.0;
    if (params.p < ce.p_c) {
        if (!log_harnack) throw RegimeError("b_p bound below p_c needs the Harnack constant");
        const double dd = params.d;
        const double gap = chain.r0 - chain.r_inf;
        return std::log(8.0) + dd * std::log(chain.r0) + std::fabs(params.p - 1.0) * *log_harnack -
               std::log(params.lambda) - 2.0 * std::log(gap) - dd * std::log(chain.r_inf);
    }
    if (!sup_norm) throw RegimeError("b_p bound for p_c <= p < p_s needs the sup norm of u");
    return (params.p - 1.0) * std::log(*sup_norm);
}

double bp_bound(const ProblemParams& params, const RadiiChain& chain, std::optional<double> log_harnack,
                std::optional<double> sup_norm) {
    return std::exp(log_bp_bound(params, chain, log_harnack, sup_norm));
}

namespace {

double log_gradient_lead(int d, double gap) {
    const double dd = d;
    return dd / 2.0 * std::log(15.0 / gap) + dd * dd / 8.0 * (std::log(2.0) + dd * std::log(dd / 2.0));
}

}  // namespace

ConstantValue gradient_K(const ProblemParams& params, const RadiiChain& chain, double b_p, double s2) {
    if (!(b_p > 0.0)) throw DomainError("b_p must be positive");
    return gradient_K_log(params, chain, std::log(b_p), s2);
}

ConstantValue gradient_K_log(const ProblemParams& params, const RadiiChain& chain, double log_b_p, double s2) {
    validate(params);
    validate(chain);
    const double dd = params.d;
    const double gap = chain.r0 - chain.r_inf;
    const double log_lb = std::log(params.lambda) + log_b_p;
    const double pv = std::max(params.p, 1.0);
    const double log_b_term = dd / 2.0 * std::log(dd * s2 * s2 * pv / (dd - 2.0)) +
                              std::log(4.0 * gap * gap / (9.0 * (dd - 2.0))) +
                              (dd - 2.0) / dd * (log_omega(dd) + dd * std::log(chain.r0)) + dd / 2.0 * log_lb;
    const double log_bracket =
        log_sum_exp(std::log(16.0 * (dd + 2.0) + gap * gap / (9.0 * chain.r_inf * chain.r_inf)), log_b_term);
    ConstantValue v;
    v.name = "K_gradient";
    v.log_value = log_gradient_lead(params.d, gap) + 0.5 * log_sum_exp(log_lb, std::log(18.0 * dd / (gap * gap))) +
                  dd / 4.0 * log_bracket;
    v.regime = "0<=p<p_s";
    v.anchor = "Local upper bounds for the gradient";
    v.echo = {{"d", dd}, {"p", params.p}, {"lambda", params.lambda}, {"log_b_p", log_b_p}, {"R0", chain.r0},
              {"R_inf", chain.r_inf}, {"S2", s2}};
    return v;
}

namespace {

ConstantValue gradient_absolute_impl(const ProblemParams& params, const RadiiChain& chain, double log_h,
                                     double s2, bool variant) {
    validate(params);
    validate(chain);
    const CriticalExponents ce = critical_exponents(params.d, params.p);
    if (!(params.p > 1.0 && params.p < ce.p_c)) throw RegimeError("absolute gradient bound needs 1 < p < p_c");
    const double dd = params.d;
    const double pm1 = params.p - 1.0;
    const double R0 = chain.r0;
    const double Ri = chain.r_inf;
    const double gap = R0 - Ri;
    // 8R0^d H^{p-1}/R_inf^d = λ b_p (R0-R_inf)^2
    const double log_lbg = std::log(8.0) + dd * std::log(R0) + pm1 * log_h - dd * std::log(Ri);
    const double gap_pow = variant ? 2.0 * (dd - 1.0) : dd - 2.0;
    const double log_b_term = dd / 2.0 * std::log(dd * s2 * s2 * params.p / (dd - 2.0)) +
                              (2.0 + 1.5 * dd) * std::log(2.0) + (dd - 2.0) / dd * log_omega(dd) +
                              (dd * dd / 2.0 + dd - 2.0) * std::log(R0) - std::log(9.0 * (dd - 2.0)) -
                              gap_pow * std::log(gap) - dd * dd / 2.0 * std::log(Ri) + dd * pm1 / 2.0 * log_h;
    const double log_bracket = log_sum_exp(std::log(16.0 * (dd + 2.0) + gap * gap / (9.0 * Ri * Ri)), log_b_term);
    // ‖u‖_{2,R0} <= |B_{R0}|^{1/2} · absolute sup bound; the displayed form uses R_inf^{d/2}
    const double norm_radius = variant ? Ri : R0;
    const double log_norm = 0.5 * log_omega(dd) + dd / 2.0 * std::log(norm_radius) + log_h +
                            (std::log(8.0) + dd * std::log(R0) - std::log(params.lambda) - 2.0 * std::log(gap) -
                             dd * std::log(Ri)) /
                                pm1;
    const double lead = dd * dd / 8.0 * (dd * std::log(dd) - (dd - 1.0) * std::log(2.0)) +
                        dd / 2.0 * std::log(15.0) - (1.0 + dd / 2.0) * std::log(gap);
    ConstantValue v;
    v.name = variant ? "K_gradient_absolute_variant" : "K_gradient_absolute";
    v.log_value = lead + 0.5 * log_sum_exp(log_lbg, std::log(18.0 * dd)) + dd / 4.0 * log_bracket + log_norm;
    v.regime = "1<p<p_c";
    v.anchor = "Local absolute bounds for the gradient when 1<p<p_c";
    v.echo = {{"d", dd}, {"p", params.p}, {"lambda", params.lambda}, {"R0", R0}, {"R_inf", Ri},
              {"log_H", log_h}, {"S2", s2}};
    return v;
}

}  // namespace

ConstantValue gradient_K_absolute(const ProblemParams& params, const RadiiChain& chain, double log_harnack,
                                  double s2) {
    return gradient_absolute_impl(params, chain, log_harnack, s2, false);
}

ConstantValue gradient_K_absolute_variant(const ProblemParams& params, const RadiiChain& chain,
                                             double log_harnack, double s2) {
    return gradient_absolute_impl(params, chain, log_harnack, s2, true);
}

}  // namespace qlb
