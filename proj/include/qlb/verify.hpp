#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlb/constants.hpp"
#include "qlb/norms.hpp"
#include "qlb/radial.hpp"

namespace qlb {

enum class CheckStatus { Pass, Fail, Inconclusive, Inapplicable };
std::string to_string(CheckStatus s);

// One inequality lhs <= rhs, carried in log space because the constants overflow binary64.
struct CheckResult {
    std::string name;
    std::string fixture;
    CheckStatus status = CheckStatus::Inconclusive;
    std::string reason;
    std::string regime;
    std::string anchor;
    double log_lhs = 0.0;
    double log_rhs = 0.0;
    double lhs_rel_error = 0.0;
    double rhs_rel_error = 0.0;
    double error_allowance = 0.0;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::string> notes;

    double log_margin() const { return log_rhs - log_lhs; }
    double lhs() const;
    double rhs() const;
    double margin() const;
};

struct VerifyOptions {
    double s2 = 0.0;  // 0 selects the default for the profile's dimension
    double eps = 0.1;
    NormOptions norm;
    // Floor of the error allowance; covers solver tolerance on point values.
    double min_allowance = 1e-9;
};

// pass when margin >= 1 + ea, fail when margin <= 1 - ea, inconclusive in between.
CheckStatus decide(double log_margin, double allowance);

// Sets status from margins and the combined error allowance.
void finalize(CheckResult& r, const VerifyOptions& opt);

CheckResult check_energy_identity(const RadialProfile& u, const RadiiChain& chain, double alpha, double delta,
                                  const VerifyOptions& opt = {});
CheckResult check_caccioppoli(const RadialProfile& u, const RadiiChain& chain, double delta,
                              const VerifyOptions& opt = {});
// λ∫_{B_R} u^{p-1} against the same right side, p > 1.
CheckResult check_caccioppoli_absolute(const RadialProfile& u, const RadiiChain& chain,
                                       const VerifyOptions& opt = {});
CheckResult check_upper(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q = std::nullopt,
                        const VerifyOptions& opt = {});
CheckResult check_upper_second_form(const RadialProfile& u, const RadiiChain& chain, double q0,
                                    std::optional<double> r_over = std::nullopt, const VerifyOptions& opt = {});
CheckResult check_lower(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q = std::nullopt,
                        const VerifyOptions& opt = {});
CheckResult check_lower_pc(const RadialProfile& u, const RadiiChain& chain,
                           std::optional<double> q_over = std::nullopt, const VerifyOptions& opt = {});
CheckResult check_rev_holder(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q, double delta,
                             const VerifyOptions& opt = {});
// Two-exponent form for 1 < p < p_c: mean over B_{R_bar} against mean over B_{R0}.
CheckResult check_rev_holder_pc(const RadialProfile& u, const RadiiChain& chain,
                                std::optional<double> q_over = std::nullopt, std::optional<double> q0 = std::nullopt,
                                const VerifyOptions& opt = {});
CheckResult check_harnack(const RadialProfile& u, const RadiiChain& chain, const ExponentWindow& window = {},
                          const VerifyOptions& opt = {});
CheckResult check_absolute(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt = {});
CheckResult check_gradient(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt = {});
CheckResult check_gradient_absolute(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt = {});

struct MoserSchedule {
    std::vector<double> beta;   // β_0..β_n
    std::vector<double> radii;  // R_0..R_n
    double c0 = 0.0;
    double gap_total = 0.0;  // Σ_{k>=1} (R_{k-1} - R_k) over the infinite schedule
};

// β_n per the exponent recursion and (R_{k-1}-R_k)^2 = (R0-R_inf)^2 c0^2/β_k.
MoserSchedule moser_schedule(int d, double p, double beta0, double R0, double R_inf, int n_max);

std::vector<CheckResult> moser_trace(const RadialProfile& u, const RadiiChain& chain,
                                     std::optional<double> q = std::nullopt, int n_max = 6,
                                     const VerifyOptions& opt = {});

// Builds the singular profile and confirms the divergence threshold and the unbounded supremum.
CheckResult counterexample_singular(const ProblemParams& params, const RadiiChain& chain,
                                    const VerifyOptions& opt = {});

// Default radii: R_inf, R_bar, R0, R = 0.25, 0.5, 0.75, 0.875 of the positivity radius.
RadiiChain default_chain(const RadialProfile& u);

}  // namespace qlb
