#pragma once

#include <optional>
#include <string>

namespace qlb {

// Instance of -Δu = λ u^p in dimension d.
struct ProblemParams {
    int d = 3;
    double p = 1.0;
    double lambda = 1.0;
};

// Throws RegimeError for d < 3 and DomainError for p < 0 or λ <= 0.
void validate(const ProblemParams& params);

struct CriticalExponents {
    double two_star = 0.0;  // 2d/(d-2)
    double p_c = 0.0;       // d/(d-2)
    double p_s = 0.0;       // (d+2)/(d-2)
    double p_1 = 0.0;       // (d+1)/(d-1), metadata only
    std::optional<double> q_bar;  // d(p-1)_+/2, present when p is given
};

CriticalExponents critical_exponents(int d);
CriticalExponents critical_exponents(int d, double p);

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// d(p-1)_+/2.
double q_bar(int d, double p);

// Nested radii R_inf < R_bar < R0 <= R. rho = R_inf/R0.
struct RadiiChain {
    double r_inf = 0.0;
    std::optional<double> r_bar;
    double r0 = 0.0;
    std::optional<double> r;

    double rho() const { return r_inf / r0; }
    // Enclosing radius, falling back to R0.
    double outer() const { return r.value_or(r0); }
};

// Throws GeometryError unless 0 < R_inf < R_bar < R0 <= R for the present radii.
void validate(const RadiiChain& chain);

// Uniformly rescale every radius by s > 0.
RadiiChain scaled(const RadiiChain& chain, double s);

// log Γ(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);

struct BallVolume {
    double value = 0.0;      // ω_d
    double log_value = 0.0;  // log ω_d
    // Stirling approximant (2eπ/d)^{d/2}/sqrt(dπ), before the e^{-α_d} correction.
    double stirling = 0.0;
    // α_d defined by ω_d = stirling · e^{-α_d}.
    double alpha = 0.0;
    double alpha_lo = 0.0;  // 1/(6d+1)
    double alpha_hi = 0.0;  // 1/(6d)
    bool in_stirling_band = false;
};

// Volume of the unit ball; d may be any real >= 1 (the q0 scan uses real d).
BallVolume ball_volume(double d);
double omega(double d);
double log_omega(double d);

// Λ_p = 2 for p != 1 and λ/4 for p = 1.
double lambda_p(double p, double lambda);

struct SeriesIdentities {
    int d = 3;
    int k = 0;
    double s = 0.0;  // 2/2* = (d-2)/d

    double total_closed = 0.0;  // Σ_{j>=1} s^j = (d-2)/2
    double total_brute = 0.0;
    double weighted_closed = 0.0;  // Σ_{j>=1} j s^j = d(d-2)/4
    double weighted_brute = 0.0;
    double tail_closed = 0.0;  // Σ_{j>k} s^j = (d/2) s^{k+1}
    double tail_brute = 0.0;
    double head_closed = 0.0;  // Σ_{j=1}^{k} s^j = (d-2)/2 (1 - s^k)
    double head_brute = 0.0;
    // Alternative head-sum form (d-2)/2 s^k; kept for comparison.
    double head_variant = 0.0;
};

SeriesIdentities series_identities(int d, int k);

struct PowerGap {
    double lhs = 0.0;        // (a-b)(a^p-b^p)
    double rhs = 0.0;        // (p∨1) max{a^{p-1}, b^{p-1}} (a-b)^2, 0^{neg} = +inf
    double rhs_sharp = 0.0;  // (p∨1) (a∨b)^{p-1} (a-b)^2
    bool holds = false;
    bool holds_sharp = false;
    // a^p - b^p >= p b^{p-1}(a-b), only evaluated for p >= 1.
    std::optional<double> tangent_lhs;
    std::optional<double> tangent_rhs;
    std::optional<bool> tangent_holds;
};

PowerGap power_gap_inequality(double a, double b, double p);

// x^y with 0^0 = 1 and 0^{negative} = +inf.
double guarded_pow(double x, double y);

}  // namespace qlb
