#include "qlb/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlb/core_params.hpp"
#include "qlb/errors.hpp"

namespace qlb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radius(const RadialProfile& u, double R) {
    if (!(R > 0.0)) throw GeometryError("ball radius must be positive");
    if (R > u.domain_end() * (1.0 + 1e-12)) {
        throw GeometryError("ball radius " + std::to_string(R) + " exceeds the profile domain " +
                            std::to_string(u.domain_end()));
    }
}

// γq >= d up to rounding in γ = 2/(p-1).
bool exponent_diverges(double g, double q, int d) { return g * q >= d * (1.0 - 1e-12); }

bool touches_zero(const RadialProfile& u, double R) {
    return !u.positive_on_domain() && R >= u.positivity_radius() * (1.0 - 1e-12);
}

QuadOptions quad_opts(const NormOptions& opt) {
    QuadOptions q;
    q.rel_tol = opt.rel_tol;
    q.abs_tol = 0.0;
    q.max_intervals = opt.max_intervals;
    return q;
}

NormValue from_log(double log_value, double rel_error, int level, Finiteness status) {
    NormValue n;
    n.log_value = log_value;
    n.value = std::exp(log_value);
    n.rel_error = rel_error;
    n.abs_error = std::isfinite(n.value) ? n.value * rel_error : kInf;
    n.refinement_level = level;
    n.status = status;
    return n;
}

NormValue divergent_value(int level, Finiteness status) {
    NormValue n;
    n.value = kInf;
    n.log_value = kInf;
    n.abs_error = kInf;
    n.rel_error = kInf;
    n.refinement_level = level;
    n.status = status;
    return n;
}

// Smallest breakpoint set keeping shooting pieces apart from the closed-form ones.
std::vector<double> profile_breaks(const RadialProfile& u, double R) {
    std::vector<double> b;
    if (u.kind() == ProfileKind::Shooting) {
        for (double f : {0.25, 0.5, 0.75}) b.push_back(f * R);
    }
    return b;
}

}  // namespace

std::string to_string(Finiteness f) {
    switch (f) {
        case Finiteness::Finite: return "finite";
        case Finiteness::Divergent: return "divergent";
        case Finiteness::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

QuadResult radial_integral(int d, const std::function<double(double)>& f, double R,
                           const std::vector<double>& breaks, std::optional<double> kappa,
                           const NormOptions& opt) {
    const double sd = d * omega(d);
    auto weighted = [&](double r) {
        if (r <= 0.0) return 0.0;
        return f(r) * std::pow(r, d - 1);
    };
    QuadOptions qo = quad_opts(opt);
    std::vector<double> pts;
    for (double b : breaks) {
        if (b > 0.0 && b < R) pts.push_back(b);
    }
    std::sort(pts.begin(), pts.end());
    QuadResult out;
    if (kappa) {
        if (*kappa <= -1.0) throw DomainError("integrand is not integrable at the origin");
        const double first = pts.empty() ? R : pts.front();
        const double grading = std::max(1.0, 1.0 / (*kappa + 1.0));
        out = integrate_graded(weighted, first, grading, qo);
        if (!pts.empty()) {
            std::vector<double> rest(pts.begin() + 1, pts.end());
            QuadResult tail = integrate(weighted, first, R, rest, qo);
            out.value += tail.value;
            out.abs_error += tail.abs_error;
            out.intervals += tail.intervals;
            out.converged = out.converged && tail.converged;
        }
    } else {
        out = integrate(weighted, 0.0, R, pts, qo);
    }
    out.value *= sd;
    out.abs_error *= sd;
    return out;
}

NormValue power_integral(const RadialProfile& u, double q, double R, const NormOptions& opt) {
    if (q == 0.0) throw DomainError("exponent q = 0 is not a norm");
    check_radius(u, R);
    if (q < 0.0 && touches_zero(u, R)) {
        throw DomainError("negative exponent on a ball where u reaches 0");
    }
    const int d = u.params().d;
    std::optional<double> kappa;
    if (u.singular_at_origin()) {
        const double g = *u.singular_exponent();
        if (exponent_diverges(g, q, d)) {
            const DivergenceResult probe = divergence_probe(u, q, R);
            return divergent_value(5, probe.status == Finiteness::Divergent ? Finiteness::Divergent
                                                                            : Finiteness::Inconclusive);
        }
        kappa = d - 1.0 - g * q;
    }
    const double uref = (q > 0.0 && !u.singular_at_origin()) ? u.center_value() : u.u(R);
    const double log_ref = std::log(uref);
    auto f = [&](double r) {
        const double v = u.u(r);
        if (v <= 0.0) return q > 0.0 ? 0.0 : kInf;
        return std::exp(q * (std::log(v) - log_ref));
    };
    const QuadResult J = radial_integral(d, f, R, profile_breaks(u, R), kappa, opt);
    if (!(J.value > 0.0) || !std::isfinite(J.value)) {
        throw SolverError("power integral quadrature produced a non-positive or non-finite value");
    }
    return from_log(q * log_ref + std::log(J.value), J.abs_error / J.value, J.intervals,
                    Finiteness::Finite);
}

NormValue lq_norm(const RadialProfile& u, double q, double R, const NormOptions& opt) {
    const NormValue I = power_integral(u, q, R, opt);
    if (!I.finite()) return I;
    return from_log(I.log_value / q, I.rel_error / std::fabs(q), I.refinement_level, I.status);
}

NormValue mean_integral(const RadialProfile& u, double q, double R, const NormOptions& opt) {
    const NormValue I = power_integral(u, q, R, opt);
    if (!I.finite()) return I;
    const double log_vol = log_omega(u.params().d) + u.params().d * std::log(R);
    return from_log(I.log_value - log_vol, I.rel_error, I.refinement_level, I.status);
}

NormValue mean_norm(const RadialProfile& u, double q, double R, const NormOptions& opt) {
    const NormValue M = mean_integral(u, q, R, opt);
    if (!M.finite()) return M;
    return from_log(M.log_value / q, M.rel_error / std::fabs(q), M.refinement_level, M.status);
}

SupInf sup_inf(const RadialProfile& u, double R) {
    check_radius(u, R);
    SupInf s;
    if (u.singular_at_origin()) {
        s.sup = kInf;
        s.sup_divergent = true;
        s.inf = u.u(R);
        s.sup_grad = kInf;
        return s;
    }
    const int n = 4001;
    const auto grid = uniform_grid(0.0, R, n);
    double best_grad = -1.0;
    int best_i = 0;
    double lo = kInf, hi = -kInf;
    for (int i = 0; i < n; ++i) {
        const Jet j = u.eval(grid[i]);
        lo = std::min(lo, j.u);
        hi = std::max(hi, j.u);
        if (std::fabs(j.du) > best_grad) {
            best_grad = std::fabs(j.du);
            best_i = i;
        }
    }
    // Golden-section polish of |u'| inside the bracketing cells.
    double a = grid[std::max(0, best_i - 1)], b = grid[std::min(n - 1, best_i + 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto g = [&](double r) { return std::fabs(u.du(r)); };
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
        if (g(c) > g(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    best_grad = std::max(best_grad, g(0.5 * (a + b)));
    if (u.monotone_decreasing()) {
        s.sup = u.u(0.0);
        s.inf = u.u(R);
    } else {
        s.sup = hi;
        s.inf = lo;
    }
    s.sup_grad = best_grad;
    return s;
}

EnergySides energy_identity_sides(const RadialProfile& u, const CutoffProfile& phi, double alpha,
                                  double delta, const NormOptions& opt) {
    if (alpha == -1.0) throw DomainError("energy identity needs alpha != -1");
    if (delta < 0.0) throw DomainError("energy identity needs delta >= 0");
    if (delta == 0.0 && !(alpha > -1.0)) throw DomainError("delta = 0 is admissible only for alpha > -1");
    if (u.singular_at_origin()) throw RegimeError("energy identity needs a W^{1,2}_loc profile");
    check_radius(u, phi.r0);
    if (delta == 0.0 && touches_zero(u, phi.r0) && alpha < 1.0) {
        throw DomainError("delta = 0 with the cutoff reaching the zero of u");
    }
    const auto& pp = u.params();
    const double a1 = alpha + 1.0;
    auto lhs_f = [&](double r) {
        const Jet j = u.eval(r);
        const CutoffValue c = cutoff_eval(phi, r);
        if (c.phi == 0.0) return 0.0;
        return alpha * a1 * a1 * std::pow(j.u + delta, alpha - 1.0) * j.du * j.du * c.phi;
    };
    auto rhs_f = [&](double r) {
        const Jet j = u.eval(r);
        const CutoffValue c = cutoff_eval(phi, r);
        const double base = j.u + delta;
        const double up = pp.p == 0.0 ? 1.0 : std::pow(std::max(j.u, 0.0), pp.p);
        return pp.lambda * a1 * a1 * up * std::pow(base, alpha) * c.phi + a1 * std::pow(base, a1) * c.lap;
    };
    std::vector<double> breaks = {phi.r1, phi.midpoint()};
    for (double b : profile_breaks(u, phi.r0)) breaks.push_back(b);
    const QuadResult L = radial_integral(pp.d, lhs_f, phi.r0, breaks, std::nullopt, opt);
    const QuadResult Rr = radial_integral(pp.d, rhs_f, phi.r0, breaks, std::nullopt, opt);
    EnergySides e;
    e.lhs = L.value;
    e.rhs = Rr.value;
    e.abs_error = L.abs_error + Rr.abs_error;
    e.residual = std::fabs(e.lhs - e.rhs) / (std::fabs(e.lhs) + std::fabs(e.rhs) + 1.0);
    return e;
}

NormValue log_gradient_integral(const RadialProfile& u, double delta, double R, const NormOptions& opt) {
    if (delta < 0.0) throw DomainError("delta must be >= 0");
    check_radius(u, R);
    if (delta == 0.0 && touches_zero(u, R)) throw DomainError("log gradient diverges where u = 0");
    const int d = u.params().d;
    std::optional<double> kappa;
    if (u.singular_at_origin()) kappa = d - 3.0;
    auto f = [&](double r) {
        const Jet j = u.eval(r);
        const double t = j.du / (j.u + delta);
        return t * t;
    };
    const QuadResult J = radial_integral(d, f, R, profile_breaks(u, R), kappa, opt);
    NormValue n;
    n.value = J.value;
    n.log_value = J.value > 0.0 ? std::log(J.value) : -kInf;
    n.abs_error = J.abs_error;
    n.rel_error = J.value > 0.0 ? J.abs_error / J.value : 0.0;
    n.refinement_level = J.intervals;
    return n;
}

NormValue source_ratio_integral(const RadialProfile& u, double delta, double R, const NormOptions& opt) {
    if (delta < 0.0) throw DomainError("delta must be >= 0");
    check_radius(u, R);
    const auto& pp = u.params();
    if (delta == 0.0 && pp.p < 1.0 && touches_zero(u, R)) {
        throw DomainError("u^{p-1} is unbounded where u = 0");
    }
    std::optional<double> kappa;
    if (u.singular_at_origin()) kappa = pp.d - 1.0 - *u.singular_exponent() * (pp.p - 1.0);
    auto f = [&](double r) {
        const double v = u.u(r);
        const double up = pp.p == 0.0 ? 1.0 : std::pow(std::max(v, 0.0), pp.p);
        return up / (v + delta);
    };
    const QuadResult J = radial_integral(pp.d, f, R, profile_breaks(u, R), kappa, opt);
    NormValue n;
    n.value = J.value;
    n.log_value = std::log(J.value);
    n.abs_error = J.abs_error;
    n.rel_error = J.abs_error / J.value;
    n.refinement_level = J.intervals;
    return n;
}

QuadResult cutoff_energy_integral(const CutoffProfile& phi, const NormOptions& opt) {
    auto f = [&](double r) { return cutoff_grad_sq_over_phi(phi, r); };
    std::vector<double> breaks = {phi.r1, phi.midpoint()};
    return radial_integral(phi.d, f, phi.r0, breaks, std::nullopt, opt);
}

DivergenceResult divergence_probe(const RadialProfile& u, double q, double R, int budget) {
    if (q == 0.0) throw DomainError("exponent q = 0 is not a norm");
    if (budget < 2) throw DomainError("divergence probe needs a budget of at least 2 refinements");
    check_radius(u, R);
    const int d = u.params().d;
    DivergenceResult res;
    if (u.singular_at_origin()) {
        const double g = *u.singular_exponent();
        res.threshold_exponent = d / g;
        res.analytic_divergent = exponent_diverges(g, q, d);
    } else {
        res.threshold_exponent = kInf;
        res.analytic_divergent = false;
    }
    const double log_ref = std::log(u.u(R));
    const double lnR = std::log(R);
    auto exponent = [&](double s) {
        const double v = u.u(std::exp(s));
        return q * (std::log(v) - log_ref) + d * (s - lnR);
    };
    auto truncated_log = [&](double r_min) {
        const double s0 = std::log(r_min);
        const double m = std::max({exponent(s0), exponent(0.5 * (s0 + lnR)), exponent(lnR)});
        auto f = [&](double s) { return std::exp(exponent(s) - m); };
        QuadOptions qo;
        qo.abs_tol = 0.0;
        qo.rel_tol = 1e-10;
        const QuadResult J = integrate(f, s0, lnR, qo);
        return m + std::log(J.value);
    };
    const double first = truncated_log(R * std::pow(10.0, -2.0));
    const double last = truncated_log(R * std::pow(10.0, -std::pow(2.0, budget)));
    res.growth = std::exp(last - first);
    res.trend_divergent = (last - first) > std::log(10.0);
    if (res.trend_divergent == res.analytic_divergent) {
        res.status = res.analytic_divergent ? Finiteness::Divergent : Finiteness::Finite;
    } else {
        res.status = Finiteness::Inconclusive;
    }
    if (res.status == Finiteness::Finite && !(q < 0.0 && touches_zero(u, R))) {
        res.value = power_integral(u, q, R).value;
    }
    return res;
}

}  // namespace qlb
