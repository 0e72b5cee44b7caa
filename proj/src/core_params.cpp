#include "qlb/core_params.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qlb/errors.hpp"

namespace qlb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool leq_with_slack(double lhs, double rhs) {
    if (std::isinf(rhs) && rhs > 0.0) return true;
    const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    return lhs <= rhs + 1e-12 * scale;
}

}  // namespace

void validate(const ProblemParams& params) {
    if (params.d < 3) {
        throw RegimeError("dimension must satisfy d >= 3, got d=" + std::to_string(params.d));
    }
    if (!(params.p >= 0.0) || !std::isfinite(params.p)) {
        throw DomainError("exponent p must be finite and >= 0");
    }
    if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) {
        throw DomainError("coefficient lambda must be finite and > 0");
    }
}

CriticalExponents critical_exponents(int d) {
    if (d < 3) {
        throw RegimeError("critical exponents need d >= 3, got d=" + std::to_string(d));
    }
    const double dd = d;
    CriticalExponents ce;
    ce.two_star = 2.0 * dd / (dd - 2.0);
    ce.p_c = dd / (dd - 2.0);
    ce.p_s = (dd + 2.0) / (dd - 2.0);
    ce.p_1 = (dd + 1.0) / (dd - 1.0);
    return ce;
}

CriticalExponents critical_exponents(int d, double p) {
    CriticalExponents ce = critical_exponents(d);
    ce.q_bar = q_bar(d, p);
    return ce;
}

double q_bar(int d, double p) { return d * positive_part(p - 1.0) / 2.0; }

void validate(const RadiiChain& c) {
    if (!(c.r_inf > 0.0)) throw GeometryError("R_inf must be positive");
    if (!(c.r_inf < c.r0)) throw GeometryError("R_inf must be smaller than R0");
    if (c.r_bar && !(c.r_inf < *c.r_bar && *c.r_bar < c.r0)) {
        throw GeometryError("R_bar must lie strictly between R_inf and R0");
    }
    if (c.r && !(c.r0 <= *c.r)) throw GeometryError("enclosing radius R must be >= R0");
    if (!std::isfinite(c.r0) || (c.r && !std::isfinite(*c.r))) {
        throw GeometryError("radii must be finite");
    }
}

RadiiChain scaled(const RadiiChain& c, double s) {
    if (!(s > 0.0)) throw DomainError("scale factor must be positive");
    RadiiChain out = c;
    out.r_inf *= s;
    out.r0 *= s;
    if (out.r_bar) *out.r_bar *= s;
    if (out.r) *out.r *= s;
    return out;
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
    static constexpr std::array<double, 9> kCoef = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection keeps the series in its accurate range.
        const double pi = std::numbers::pi;
        return std::log(pi / std::fabs(std::sin(pi * x))) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = kCoef[0];
    const double t = z + 7.5;
    for (int i = 1; i < 9; ++i) a += kCoef[i] / (z + i);
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

BallVolume ball_volume(double d) {
    if (!(d >= 1.0)) throw DomainError("ball_volume requires d >= 1");
    const double pi = std::numbers::pi;
    const double e = std::numbers::e;
    BallVolume bv;
    bv.log_value = 0.5 * d * std::log(pi) - log_gamma(1.0 + 0.5 * d);
    bv.value = std::exp(bv.log_value);
    const double log_stirling = 0.5 * d * std::log(2.0 * e * pi / d) - 0.5 * std::log(d * pi);
    bv.stirling = std::exp(log_stirling);
    bv.alpha = log_stirling - bv.log_value;
    bv.alpha_lo = 1.0 / (6.0 * d + 1.0);
    bv.alpha_hi = 1.0 / (6.0 * d);
    bv.in_stirling_band = bv.alpha >= bv.alpha_lo && bv.alpha <= bv.alpha_hi;
    return bv;
}

double omega(double d) { return ball_volume(d).value; }
double log_omega(double d) { return ball_volume(d).log_value; }

double lambda_p(double p, double lambda) { return p == 1.0 ? lambda / 4.0 : 2.0; }

SeriesIdentities series_identities(int d, int k) {
    if (d < 3) throw RegimeError("series identities need d >= 3");
    if (k < 0) throw DomainError("series identities need k >= 0");
    SeriesIdentities s;
    s.d = d;
    s.k = k;
    const double dd = d;
    s.s = (dd - 2.0) / dd;
    s.total_closed = (dd - 2.0) / 2.0;
    s.weighted_closed = dd * (dd - 2.0) / 4.0;
    s.tail_closed = dd / 2.0 * std::pow(s.s, k + 1);
    s.head_closed = (dd - 2.0) / 2.0 * (1.0 - std::pow(s.s, k));
    s.head_variant = (dd - 2.0) / 2.0 * std::pow(s.s, k);

    // Brute force: accumulate smallest terms first so the sums reach machine precision.
    const int n_max = 20000;
    double total = 0.0, weighted = 0.0, tail = 0.0;
    for (int j = n_max; j >= 1; --j) {
        const double t = std::pow(s.s, j);
        total += t;
        weighted += j * t;
        if (j > k) tail += t;
    }
    double head = 0.0;
    for (int j = k; j >= 1; --j) head += std::pow(s.s, j);
    s.total_brute = total;
    s.weighted_brute = weighted;
    s.tail_brute = tail;
    s.head_brute = head;
    return s;
}

double guarded_pow(double x, double y) {
    if (x == 0.0) {
        if (y == 0.0) return 1.0;
        return y > 0.0 ? 0.0 : kInf;
    }
    return std::pow(x, y);
}

PowerGap power_gap_inequality(double a, double b, double p) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("power gap needs a, b >= 0");
    if (!(p > 0.0)) throw DomainError("power gap needs p > 0");
    PowerGap g;
    const double diff = a - b;
    g.lhs = diff * (guarded_pow(a, p) - guarded_pow(b, p));
    const double pv = std::max(p, 1.0);
    const double sq = diff * diff;
    if (sq == 0.0) {
        // 0^{p-1} · 0 = 0 even when the max is infinite.
        g.rhs = 0.0;
        g.rhs_sharp = 0.0;
    } else {
        g.rhs = pv * std::max(guarded_pow(a, p - 1.0), guarded_pow(b, p - 1.0)) * sq;
        g.rhs_sharp = pv * guarded_pow(std::max(a, b), p - 1.0) * sq;
    }
    g.holds = leq_with_slack(g.lhs, g.rhs);
    g.holds_sharp = leq_with_slack(g.lhs, g.rhs_sharp);
    if (p >= 1.0) {
        g.tangent_lhs = guarded_pow(a, p) - guarded_pow(b, p);
        g.tangent_rhs = diff == 0.0 ? 0.0 : p * guarded_pow(b, p - 1.0) * diff;
        g.tangent_holds = leq_with_slack(*g.tangent_rhs, *g.tangent_lhs);
    }
    return g;
}

}  // namespace qlb
