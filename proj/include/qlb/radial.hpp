#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qlb/core_params.hpp"

namespace qlb {

enum class ProfileKind { ClosedFormP0, ClosedFormLinearD3, Singular, Shooting, Stub };
enum class ProfileRole { Solution, Subsolution, Supersolution, NotASolution };

std::string to_string(ProfileKind k);
std::string to_string(ProfileRole r);

// Value and first two radial derivatives.
struct Jet {
    double u = 0.0;
    double du = 0.0;
    double d2u = 0.0;
};

struct ProfileSample {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};

// Immutable radial function on [0, domain_end] (or (0, domain_end] when singular).
class RadialProfile {
public:
    using Evaluator = std::function<Jet(double)>;

    struct Spec {
        ProfileKind kind = ProfileKind::Stub;
        ProfileRole role = ProfileRole::NotASolution;
        ProblemParams params;
        Evaluator eval;
        double domain_end = 1.0;
        double positivity_radius = 1.0;  // largest r with u > 0 on [0, r)
        bool positive_on_domain = true;  // false when u reaches 0 at positivity_radius
        std::optional<double> singular_exponent;
        bool monotone_decreasing = true;
        double center_value = 1.0;  // u(0), or u(domain_end) when singular
        std::vector<ProfileSample> samples;
        std::string label;
    };

    explicit RadialProfile(Spec spec);

    ProfileKind kind() const { return s_->kind; }
    ProfileRole role() const { return s_->role; }
    const ProblemParams& params() const { return s_->params; }
    const std::string& label() const { return s_->label; }
    double domain_end() const { return s_->domain_end; }
    double positivity_radius() const { return s_->positivity_radius; }
    bool positive_on_domain() const { return s_->positive_on_domain; }
    bool singular_at_origin() const { return s_->singular_exponent.has_value(); }
    std::optional<double> singular_exponent() const { return s_->singular_exponent; }
    bool monotone_decreasing() const { return s_->monotone_decreasing; }
    double center_value() const { return s_->center_value; }
    const std::vector<ProfileSample>& samples() const { return s_->samples; }
    bool is_solution() const { return s_->role == ProfileRole::Solution; }

    // Throws GeometryError outside the domain (r <= 0 for singular profiles).
    Jet eval(double r) const;
    double u(double r) const { return eval(r).u; }
    double du(double r) const { return eval(r).du; }

    // factor·u. Remains a solution only when factor = 1 or p = 1.
    RadialProfile scaled(double factor) const;
    // μ^{2/(p-1)} u(μ r) on [0, domain_end/μ]; p > 1 only.
    RadialProfile rescaled(double mu) const;

    // Uniform (r, u, u') grid with n points on [r_lo, r_hi] for CSV export.
    std::vector<ProfileSample> tabulate(double r_lo, double r_hi, int n) const;

private:
    std::shared_ptr<const Spec> s_;
};

struct ShootingOptions {
    double r_max = 0.0;  // 0 means 200 intrinsic length scales
    double tol = 1e-10;
    long max_steps = 2000000;
};

// Integrates u'' + (d-1)u'/r + λ u^p = 0 with u(0) = u0, u'(0) = 0 (Dormand-Prince 5(4)).
RadialProfile solve_lane_emden(const ProblemParams& params, double u0, const ShootingOptions& opt = {});

// u0 - λ r²/(2d), exact for p = 0.
RadialProfile explicit_p0(const ProblemParams& params, double u0);
// u0 sin(√λ r)/(√λ r), exact for p = 1 and d = 3.
RadialProfile explicit_linear_d3(double lambda, double u0);
// A r^{-γ} with γ = 2/(p-1), A = [γ(d-2-γ)/λ]^{1/(p-1)}, for p_c < p < p_s.
RadialProfile singular_profile(const ProblemParams& params, double r_max = 1.0);
// u ≡ c on [0, r_max]; not a solution.
RadialProfile constant_stub(const ProblemParams& params, double c, double r_max = 1.0);
// u(r) = r^k on [0, r_max]; test fixture for norms.
RadialProfile power_stub(const ProblemParams& params, double k, double r_max = 1.0);

// Picks the closed form where one exists, otherwise shoots.
RadialProfile make_solution(const ProblemParams& params, double u0, const ShootingOptions& opt = {});

struct ResidualReport {
    double sup_abs = 0.0;  // sup |u'' + (d-1)u'/r + λu^p|
    double sup_rel = 0.0;  // normalized by max(1, |u''| + |(d-1)u'/r| + |λu^p|)
    double at_r = 0.0;     // location of the largest normalized value
};

// Strong-form residual on a grid inside the validity interval.
ResidualReport residual(const RadialProfile& profile, const std::vector<double>& r_grid);
// n uniform points on [r_lo, r_hi].
std::vector<double> uniform_grid(double r_lo, double r_hi, int n);

}  // namespace qlb
