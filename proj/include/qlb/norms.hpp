#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qlb/cutoff.hpp"
#include "qlb/quadrature.hpp"
#include "qlb/radial.hpp"

namespace qlb {

enum class Finiteness { Finite, Divergent, Inconclusive };
std::string to_string(Finiteness f);

// A norm or integral carried in log space; value may overflow to +inf while log_value stays finite.
struct NormValue {
    double value = 0.0;
    double log_value = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    int refinement_level = 0;
    Finiteness status = Finiteness::Finite;

    bool divergent() const { return status == Finiteness::Divergent; }
    bool finite() const { return status == Finiteness::Finite; }
};

struct NormOptions {
    double rel_tol = 1e-11;
    int max_intervals = 4000;
};

// ∫_{B_R} u^q, q any real. q < 0 requires u > 0 on the closed ball.
NormValue power_integral(const RadialProfile& u, double q, double R, const NormOptions& opt = {});
// (∫_{B_R} u^q)^{1/q}; for q < 0 this is ‖u‖_{-|q|} = (∫u^{-|q|})^{-1/|q|}.
NormValue lq_norm(const RadialProfile& u, double q, double R, const NormOptions& opt = {});
// ⨍_{B_R} u^q.
NormValue mean_integral(const RadialProfile& u, double q, double R, const NormOptions& opt = {});
// (⨍_{B_R} u^q)^{1/q}.
NormValue mean_norm(const RadialProfile& u, double q, double R, const NormOptions& opt = {});

struct SupInf {
    double sup = 0.0;
    double inf = 0.0;
    double sup_grad = 0.0;
    bool sup_divergent = false;
};

// Extremes on the closed ball B_R. Monotone profiles use the endpoints; others fall back to a scan.
SupInf sup_inf(const RadialProfile& u, double R);

struct EnergySides {
    double lhs = 0.0;  // 4α ∫|∇(u+δ)^{(α+1)/2}|² φ
    double rhs = 0.0;  // λ(α+1)² ∫u^p (u+δ)^α φ + (α+1) ∫(u+δ)^{α+1} Δφ
    double residual = 0.0;  // |lhs - rhs| / (|lhs| + |rhs| + 1)
    double abs_error = 0.0;
};

EnergySides energy_identity_sides(const RadialProfile& u, const CutoffProfile& phi, double alpha,
                                  double delta, const NormOptions& opt = {});

// ∫_{B_R} |∇ log(u+δ)|².
NormValue log_gradient_integral(const RadialProfile& u, double delta, double R,
                                const NormOptions& opt = {});
// ∫_{B_R} u^p/(u+δ).
NormValue source_ratio_integral(const RadialProfile& u, double delta, double R,
                                const NormOptions& opt = {});
// ∫_{B_R} |∇φ|²/φ for the cutoff.
QuadResult cutoff_energy_integral(const CutoffProfile& phi, const NormOptions& opt = {});

struct DivergenceResult {
    Finiteness status = Finiteness::Finite;
    bool analytic_divergent = false;  // γq >= d
    bool trend_divergent = false;     // truncated integrals grew more than 10x
    double threshold_exponent = 0.0;  // d/γ, +inf for regular profiles
    double growth = 1.0;              // last/first truncated integral
    std::optional<double> value;      // ∫_{B_R} u^q when finite
};

// Classifies ∫_{B_R} u^q by truncating at R·10^{-2^k}, k = 1..budget, plus the exponent test.
DivergenceResult divergence_probe(const RadialProfile& u, double q, double R, int budget = 5);

// s_d ∫_{r_lo}^{R} f(r) r^{d-1} dr with breakpoints, graded near 0 when the integrand behaves like
// r^{kappa} there (kappa > -1 relative to the r^{d-1} weight already included).
QuadResult radial_integral(int d, const std::function<double(double)>& f, double R,
                           const std::vector<double>& breaks, std::optional<double> kappa,
                           const NormOptions& opt = {});

}  // namespace qlb
