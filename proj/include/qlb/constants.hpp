#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlb/core_params.hpp"

namespace qlb {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A constant carried as its natural logarithm; these constants span hundreds of decades.
struct ConstantValue {
    std::string name;
    double log_value = 0.0;
    std::string regime;
    std::string anchor;
    std::vector<std::pair<std::string, double>> echo;

    double value() const { return std::exp(log_value); }
    double log10_value() const { return log_value / std::log(10.0); }
};

// Default S2: the optimal whole-space constant [πd(d-2)]^{-1/2} (Γ(d)/Γ(d/2))^{1/d}.
double sobolev_default(int d);
// Override passthrough (must be > 0) or the default.
double sobolev_constant(int d, std::optional<double> override_value = std::nullopt);

struct C1Result {
    double c1 = 0.0;
    std::optional<int> k0;
    std::optional<double> log_ratio;  // A(q); absent on the q > d/(d-2) branch
    bool admissible = true;
};

// Tolerance for "A(q) is an integer" tests.
constexpr double kIntegerTol = 1e-9;

C1Result c1_and_k0(int d, double p, double q);

// β_n = (d/(d-2))^{n-1}(q - q̄) + (p-1)_+(d-2)/2 with β_0 = 2q/2*.
double beta_n(int d, double p, double q, int n);

struct NudgeResult {
    double q = 0.0;
    bool nudged = false;
};

// q when admissible, else the largest admissible q(1 - 2^{-k}·1e-3) above q̄.
NudgeResult nudge_q(int d, double p, double q);

// I_{∞,q} of the local upper estimate, with ρ = R_inf/R0.
ConstantValue upper_I_inf(const ProblemParams& params, double rho, double q, double s2);

// 8 ω_d R0^d / (R0 - R)^2.
ConstantValue caccioppoli_rhs(int d, double R0, double R);

// K^{(1)}_{r,d}; r = +inf returns the limit (2/d)(d/(d-2))^{(d-2)/2}.
double young_K1(double r, int d);

struct CutoffSup {
    double sup_phi = 1.0;
    double sup_grad = 0.0;
    double sup_lap = 0.0;
};

ConstantValue reverse_poincare_K2(double alpha, double r, int d, double R, double b_norm,
                                  const CutoffSup& phi, double s2);

// K^{(3)}_q[b]; r = +inf selects the bounded-coefficient form.
ConstantValue moser_K3(double q, double r, int d, double R0, double R_inf, double b_norm, double s2);

double degiorgi_c(double alpha, double lam, double theta);

// q_over may be +inf.
ConstantValue extension_constant(double q_over, double q_under, double q0, double gamma, double K,
                                 double R0, double R_inf);

struct AConstants {
    double log_A1 = 0.0;
    double log_A2 = 0.0;
    double log_A3 = 0.0;
    bool superlinear_branch = false;  // q0 > 1
};

// A^{(1..3)}_{q0} with enclosing radius R; r = +inf allowed.
AConstants a_constants(double q0, double r, int d, double R, double R_inf, double s2);

struct SecondForm {
    double log_bracket = 0.0;     // log[A2 + A3 λ^{e_λ} ‖u‖^{e_u}]
    double lambda_exponent = 0.0; // d(p-1)/(2r̄ - d(p-1))
    double norm_exponent = 0.0;   // d(p-1)r̄/(2r̄ - d(p-1))
    double log_multiplier = 0.0;  // log[A1/(R0-R_inf)^{d/q0} · bracket^{d/(2q0)}]
    AConstants a;
};

// p > 1 form with r = r̄/(p-1); the A-constants use the enclosing radius R.
SecondForm second_form_bracket(const ProblemParams& params, double R_inf, double R0, double R, double q0,
                               double r_over, double u_norm, double s2);

// Same bracket for a generic coefficient: ‖b‖_r^{rd/(2r-d)} supplied directly (r may be +inf).
SecondForm unbounded_coefficient_bracket(int d, double R_inf, double R0, double R, double q0, double r,
                                         double b_norm, double s2);

struct JohnNirenberg {
    double kappa0 = 0.0;
    double kappa1 = 0.0;
    double kappa3 = 0.0;
};

JohnNirenberg jn_constants(int d, double diam, double vol, double kappa2);

// 2^{(d-3)/2} / (d ω_d^2 [e(d-1) + ε]), d real >= 1.
double q0_threshold(double d, double eps);
// The ε = e choice used for 1 < p < p_c: 2^{(d-3)/2}/(d^2 ω_d^2 e).
double q0_threshold_pc(int d);

ConstantValue lower_I(int d, double q, double eps, double R0, double R_inf, double s2);

// PcRange: standalone reverse Holder form; LowerBound: the form used inside the lower estimate.
enum class RevHolderForm { PcRange, LowerBound };

// I_{q̄,q0} with its two branches split at q0 = (d-2)q̄/d.
ConstantValue rev_holder_I(int d, double p, double q_over, double q0, double R_bar, double R0, double s2,
                           RevHolderForm form = RevHolderForm::PcRange);

struct ExponentWindow {
    std::optional<double> q;        // upper-estimate exponent
    std::optional<double> q_over;   // q̄ side of two-exponent constants
    std::optional<double> q_under;  // q̲
    double eps = 0.1;
};

struct HarnackNorms {
    double log_mean_q_over_R0 = 0.0;   // log ⨍_{R0} u^{q̄}
    double log_mean_q_under_R0 = 0.0;  // log ⨍_{R0} u^{q̲}
    double log_mean_pm1_Rinf = 0.0;    // log ⨍_{R_inf} u^{p-1}
};

enum class HarnackRegime { Sublinear, Subcritical, General };
std::string to_string(HarnackRegime r);

struct HarnackValue {
    double log_value = 0.0;
    HarnackRegime regime = HarnackRegime::Sublinear;
    std::string anchor;
    double q_over = 0.0;
    double q_under = 0.0;
    // Sublinear regime data.
    std::optional<int> n0;
    std::optional<int> n0_statement;
    std::optional<double> eps;
    std::optional<double> q0;
    std::vector<std::string> warnings;
    // Pieces of the subcritical and general formulas.
    std::optional<double> log_I_upper;
    std::optional<double> log_I_lower;
    std::optional<double> log_I_rev;

    double value() const { return std::exp(log_value); }
};

// Exponents the Harnack dispatcher will use for this instance (before norms are supplied).
ExponentWindow harnack_window(const ProblemParams& params, const ExponentWindow& hint);

HarnackValue harnack_constant(const ProblemParams& params, const RadiiChain& chain,
                              const ExponentWindow& window, const std::optional<HarnackNorms>& norms,
                              double s2);

struct AbsoluteBounds {
    std::optional<double> log_upper;
    std::optional<double> log_lower;
    std::string reason;
    std::optional<HarnackValue> harnack;
};

// Radius R of the theorem is the chain's R_inf.
AbsoluteBounds absolute_bounds(const ProblemParams& params, const RadiiChain& chain,
                               const ExponentWindow& window, double s2);

// b_{p,R0}[u] bound; harnack needed for 0 <= p < p_c, p != 1; sup_norm for p_c <= p < p_s.
double bp_bound(const ProblemParams& params, const RadiiChain& chain, std::optional<double> log_harnack,
                std::optional<double> sup_norm);

// log of the same bound; stays finite when b_p itself overflows.
double log_bp_bound(const ProblemParams& params, const RadiiChain& chain, std::optional<double> log_harnack,
                    std::optional<double> sup_norm);

// K[u] multiplier of ‖u‖_{2,R0}.
ConstantValue gradient_K(const ProblemParams& params, const RadiiChain& chain, double b_p, double s2);
ConstantValue gradient_K_log(const ProblemParams& params, const RadiiChain& chain, double log_b_p, double s2);

// Absolute gradient bound for 1 < p < p_c assembled from K[u] with the absolute substitutions.
ConstantValue gradient_K_absolute(const ProblemParams& params, const RadiiChain& chain, double log_harnack,
                                  double s2);
// The same bound with the displayed closed form (its (R0-R_inf) power is 2(d-1) instead of d-2).
ConstantValue gradient_K_absolute_variant(const ProblemParams& params, const RadiiChain& chain,
                                             double log_harnack, double s2);

}  // namespace qlb
