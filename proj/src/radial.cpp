#include "qlb/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qlb/errors.hpp"

namespace qlb {

std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::ClosedFormP0: return "closed_form_p0";
        case ProfileKind::ClosedFormLinearD3: return "closed_form_linear_d3";
        case ProfileKind::Singular: return "singular";
        case ProfileKind::Shooting: return "shooting";
        case ProfileKind::Stub: return "stub";
    }
    return "unknown";
}

std::string to_string(ProfileRole r) {
    switch (r) {
        case ProfileRole::Solution: return "solution";
        case ProfileRole::Subsolution: return "subsolution";
        case ProfileRole::Supersolution: return "supersolution";
        case ProfileRole::NotASolution: return "not_a_solution";
    }
    return "unknown";
}

RadialProfile::RadialProfile(Spec spec) : s_(std::make_shared<const Spec>(std::move(spec))) {}

Jet RadialProfile::eval(double r) const {
    const double slack = 1e-12 * s_->domain_end;
    if (!(r >= 0.0) || r > s_->domain_end + slack) {
        throw GeometryError("radius " + std::to_string(r) + " outside profile domain [0, " +
                            std::to_string(s_->domain_end) + "]");
    }
    if (singular_at_origin() && r == 0.0) {
        throw GeometryError("singular profile cannot be evaluated at the origin");
    }
    return s_->eval(std::min(r, s_->domain_end));
}

RadialProfile RadialProfile::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("profile scale factor must be positive");
    Spec sp = *s_;
    auto inner = s_->eval;
    sp.eval = [inner, factor](double r) {
        Jet j = inner(r);
        return Jet{factor * j.u, factor * j.du, factor * j.d2u};
    };
    if (factor != 1.0 && s_->params.p != 1.0) sp.role = ProfileRole::NotASolution;
    sp.center_value *= factor;
    for (auto& smp : sp.samples) {
        smp.u *= factor;
        smp.du *= factor;
    }
    sp.label += " x" + std::to_string(factor);
    return RadialProfile(std::move(sp));
}

RadialProfile RadialProfile::rescaled(double mu) const {
    if (!(s_->params.p > 1.0)) throw RegimeError("scaling family requires p > 1");
    if (!(mu > 0.0)) throw DomainError("scaling parameter must be positive");
    const double g = 2.0 / (s_->params.p - 1.0);
    const double a0 = std::pow(mu, g), a1 = a0 * mu, a2 = a1 * mu;
    Spec sp = *s_;
    auto inner = s_->eval;
    sp.eval = [inner, mu, a0, a1, a2](double r) {
        Jet j = inner(mu * r);
        return Jet{a0 * j.u, a1 * j.du, a2 * j.d2u};
    };
    sp.domain_end /= mu;
    sp.positivity_radius /= mu;
    sp.center_value *= a0;
    for (auto& smp : sp.samples) {
        smp.r /= mu;
        smp.u *= a0;
        smp.du *= a1;
    }
    sp.label += " rescaled";
    return RadialProfile(std::move(sp));
}

std::vector<ProfileSample> RadialProfile::tabulate(double r_lo, double r_hi, int n) const {
    std::vector<ProfileSample> out;
    for (double r : uniform_grid(r_lo, r_hi, n)) {
        const Jet j = eval(r);
        out.push_back({r, j.u, j.du});
    }
    return out;
}

std::vector<double> uniform_grid(double r_lo, double r_hi, int n) {
    if (n < 2) return {r_lo};
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = r_lo + (r_hi - r_lo) * i / (n - 1);
    g.back() = r_hi;
    return g;
}

namespace {

double source(double u, double p) {
    const double v = std::max(u, 0.0);
    if (p == 0.0) return 1.0;
    return v == 0.0 ? 0.0 : std::pow(v, p);
}

// Quintic Hermite basis on [0, 1] as coefficient rows (value/slope/curvature at 0, then at 1).
constexpr std::array<std::array<double, 6>, 6> kHermite = {{
    {1.0, 0.0, 0.0, -10.0, 15.0, -6.0},
    {0.0, 1.0, 0.0, -6.0, 8.0, -3.0},
    {0.0, 0.0, 0.5, -1.5, 1.5, -0.5},
    {0.0, 0.0, 0.0, 10.0, -15.0, 6.0},
    {0.0, 0.0, 0.0, -4.0, 7.0, -3.0},
    {0.0, 0.0, 0.0, 0.5, -1.0, 0.5},
}};

struct Node {
    double r, u, du, d2u;
};

Jet hermite(const Node& a, const Node& b, double r) {
    const double h = b.r - a.r;
    const double t = (r - a.r) / h;
    const std::array<double, 6> w = {a.u, a.du * h, a.d2u * h * h, b.u, b.du * h, b.d2u * h * h};
    double v = 0.0, v1 = 0.0, v2 = 0.0;
    for (int i = 0; i < 6; ++i) {
        const auto& c = kHermite[i];
        double p0 = 0.0, p1 = 0.0, p2 = 0.0;
        for (int k = 5; k >= 0; --k) p0 = p0 * t + c[k];
        for (int k = 5; k >= 1; --k) p1 = p1 * t + k * c[k];
        for (int k = 5; k >= 2; --k) p2 = p2 * t + k * (k - 1) * c[k];
        v += w[i] * p0;
        v1 += w[i] * p1;
        v2 += w[i] * p2;
    }
    return Jet{v, v1 / h, v2 / (h * h)};
}

struct State {
    double u, v;
};

struct Dopri {
    int d;
    double p, lambda;

    State rhs(double r, const State& y) const {
        return {y.v, -(d - 1) * y.v / r - lambda * source(y.u, p)};
    }

    // One Dormand-Prince step; returns the fifth-order state and the embedded error.
    std::pair<State, State> step(double r, const State& y, double h) const {
        auto add = [](const State& y0, double h0, std::initializer_list<std::pair<double, State>> ks) {
            State s = y0;
            for (const auto& [c, k] : ks) {
                s.u += h0 * c * k.u;
                s.v += h0 * c * k.v;
            }
            return s;
        };
        const State k1 = rhs(r, y);
        const State k2 = rhs(r + h / 5.0, add(y, h, {{1.0 / 5.0, k1}}));
        const State k3 = rhs(r + 3.0 * h / 10.0, add(y, h, {{3.0 / 40.0, k1}, {9.0 / 40.0, k2}}));
        const State k4 =
            rhs(r + 4.0 * h / 5.0, add(y, h, {{44.0 / 45.0, k1}, {-56.0 / 15.0, k2}, {32.0 / 9.0, k3}}));
        const State k5 = rhs(r + 8.0 * h / 9.0, add(y, h,
                                                    {{19372.0 / 6561.0, k1},
                                                     {-25360.0 / 2187.0, k2},
                                                     {64448.0 / 6561.0, k3},
                                                     {-212.0 / 729.0, k4}}));
        const State k6 = rhs(r + h, add(y, h,
                                        {{9017.0 / 3168.0, k1},
                                         {-355.0 / 33.0, k2},
                                         {46732.0 / 5247.0, k3},
                                         {49.0 / 176.0, k4},
                                         {-5103.0 / 18656.0, k5}}));
        const State y5 = add(y, h,
                             {{35.0 / 384.0, k1},
                              {500.0 / 1113.0, k3},
                              {125.0 / 192.0, k4},
                              {-2187.0 / 6784.0, k5},
                              {11.0 / 84.0, k6}});
        const State k7 = rhs(r + h, y5);
        const State err = add(State{0.0, 0.0}, h,
                              {{71.0 / 57600.0, k1},
                               {-71.0 / 16695.0, k3},
                               {71.0 / 1920.0, k4},
                               {-17253.0 / 339200.0, k5},
                               {22.0 / 525.0, k6},
                               {-1.0 / 40.0, k7}});
        return {y5, err};
    }
};

RadialProfile from_nodes(const ProblemParams& params, std::vector<Node> nodes, bool hit_zero,
                         double u0) {
    RadialProfile::Spec sp;
    sp.kind = ProfileKind::Shooting;
    sp.role = ProfileRole::Solution;
    sp.params = params;
    sp.domain_end = nodes.back().r;
    sp.positivity_radius = nodes.back().r;
    sp.positive_on_domain = !hit_zero;
    sp.center_value = u0;
    bool mono = true;
    for (const auto& n : nodes) {
        sp.samples.push_back({n.r, n.u, n.du});
        if (n.du > 1e-12 * u0) mono = false;
    }
    sp.monotone_decreasing = mono;
    auto shared = std::make_shared<const std::vector<Node>>(std::move(nodes));
    sp.eval = [shared](double r) {
        const auto& ns = *shared;
        if (r <= ns.front().r) return Jet{ns.front().u, ns.front().du, ns.front().d2u};
        if (r >= ns.back().r) return Jet{ns.back().u, ns.back().du, ns.back().d2u};
        auto it = std::upper_bound(ns.begin(), ns.end(), r, [](double x, const Node& n) { return x < n.r; });
        const std::size_t i = static_cast<std::size_t>(it - ns.begin());
        return hermite(ns[i - 1], ns[i], r);
    };
    sp.label = "shooting d=" + std::to_string(params.d) + " p=" + std::to_string(params.p) +
               " lambda=" + std::to_string(params.lambda) + " u0=" + std::to_string(u0);
    return RadialProfile(std::move(sp));
}

}  // namespace

RadialProfile solve_lane_emden(const ProblemParams& params, double u0, const ShootingOptions& opt) {
    validate(params);
    if (!(u0 > 0.0) || !std::isfinite(u0)) throw DomainError("center value u0 must be positive");
    if (!(opt.tol > 0.0)) throw DomainError("solver tolerance must be positive");
    const int d = params.d;
    const double p = params.p, lam = params.lambda;
    const double r_scale = 1.0 / std::sqrt(lam * std::pow(u0, p - 1.0));
    const double r_max = opt.r_max > 0.0 ? opt.r_max : 200.0 * r_scale;
    const double h_max = r_scale / 250.0;

    // Series start u0 + a r^2 + b r^4 on [0, r_start].
    const double a = -lam * std::pow(u0, p) / (2.0 * d);
    const double b = lam * lam * p * std::pow(u0, 2.0 * p - 1.0) / (8.0 * d * (d + 2.0));
    const double r_start = std::min(1e-3 * r_scale, 0.5 * r_max);
    const Dopri ode{d, p, lam};
    auto node_at = [&](double r, const State& y) {
        const double d2u = r == 0.0 ? 2.0 * a : -(d - 1) * y.v / r - lam * source(y.u, p);
        return Node{r, y.u, y.v, d2u};
    };

    std::vector<Node> nodes;
    nodes.push_back(Node{0.0, u0, 0.0, 2.0 * a});
    double r = r_start;
    State y{u0 + a * r * r + b * r * r * r * r, 2.0 * a * r + 4.0 * b * r * r * r};
    nodes.push_back(node_at(r, y));

    const double atol_u = opt.tol * u0;
    const double atol_v = opt.tol * u0 / r_scale;
    double h = std::min(h_max, r_start);
    bool hit_zero = false;
    long steps = 0;
    while (r < r_max) {
        if (++steps > opt.max_steps) throw SolverError("Lane-Emden step budget exhausted");
        h = std::min({h, h_max, r_max - r});
        auto [yn, err] = ode.step(r, y, h);
        const double su = atol_u + opt.tol * std::max(std::fabs(y.u), std::fabs(yn.u));
        const double sv = atol_v + opt.tol * std::max(std::fabs(y.v), std::fabs(yn.v));
        const double en = std::max(std::fabs(err.u) / su, std::fabs(err.v) / sv);
        if (!std::isfinite(en) || en > 1.0) {
            const double fac = std::isfinite(en) ? std::max(0.1, 0.9 * std::pow(en, -0.2)) : 0.1;
            h *= fac;
            if (h < 1e-14 * std::max(r, r_scale)) throw SolverError("Lane-Emden step size underflow");
            continue;
        }
        if (yn.u <= 0.0) {
            // Bisect the step length so the last node sits on the zero of u.
            double lo = 0.0, hi = h;
            State best = yn;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (r + h); ++it) {
                const double mid = 0.5 * (lo + hi);
                const State ym = ode.step(r, y, mid).first;
                if (ym.u > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                    best = ym;
                }
            }
            if (lo > 0.0) {
                const State yl = ode.step(r, y, lo).first;
                nodes.push_back(node_at(r + lo, yl));
            }
            best.u = 0.0;
            r += hi;
            nodes.push_back(node_at(r, best));
            hit_zero = true;
            break;
        }
        r += h;
        y = yn;
        nodes.push_back(node_at(r, y));
        const double fac = en > 0.0 ? std::min(5.0, 0.9 * std::pow(en, -0.2)) : 5.0;
        h *= fac;
    }
    return from_nodes(params, std::move(nodes), hit_zero, u0);
}

RadialProfile explicit_p0(const ProblemParams& params, double u0) {
    validate(params);
    if (params.p != 0.0) throw RegimeError("explicit_p0 requires p = 0");
    if (!(u0 > 0.0)) throw DomainError("center value u0 must be positive");
    const double c = params.lambda / (2.0 * params.d);
    RadialProfile::Spec sp;
    sp.kind = ProfileKind::ClosedFormP0;
    sp.role = ProfileRole::Solution;
    sp.params = params;
    sp.domain_end = std::sqrt(u0 / c);
    sp.positivity_radius = sp.domain_end;
    sp.positive_on_domain = false;
    sp.center_value = u0;
    sp.eval = [u0, c](double r) { return Jet{u0 - c * r * r, -2.0 * c * r, -2.0 * c}; };
    sp.label = "p0 d=" + std::to_string(params.d) + " lambda=" + std::to_string(params.lambda) +
               " u0=" + std::to_string(u0);
    return RadialProfile(std::move(sp));
}

RadialProfile explicit_linear_d3(double lambda, double u0) {
    const ProblemParams params{3, 1.0, lambda};
    validate(params);
    if (!(u0 > 0.0)) throw DomainError("center value u0 must be positive");
    const double k = std::sqrt(lambda);
    RadialProfile::Spec sp;
    sp.kind = ProfileKind::ClosedFormLinearD3;
    sp.role = ProfileRole::Solution;
    sp.params = params;
    sp.domain_end = std::numbers::pi / k;
    sp.positivity_radius = sp.domain_end;
    sp.positive_on_domain = false;
    sp.center_value = u0;
    sp.eval = [u0, k](double r) {
        const double x = k * r;
        if (x < 1e-3) {
            const double x2 = x * x;
            return Jet{u0 * (1.0 - x2 / 6.0 + x2 * x2 / 120.0), u0 * k * (-x / 3.0 + x2 * x / 30.0),
                       u0 * k * k * (-1.0 / 3.0 + x2 / 10.0)};
        }
        const double s = std::sin(x), c = std::cos(x);
        const double u = u0 * s / x;
        const double du = u0 * k * (x * c - s) / (x * x);
        const double d2u = -2.0 * du / r - k * k * u;
        return Jet{u, du, d2u};
    };
    sp.label = "linear d=3 lambda=" + std::to_string(lambda) + " u0=" + std::to_string(u0);
    return RadialProfile(std::move(sp));
}

RadialProfile singular_profile(const ProblemParams& params, double r_max) {
    validate(params);
    const CriticalExponents ce = critical_exponents(params.d);
    if (!(params.p > ce.p_c && params.p < ce.p_s)) {
        throw RegimeError("singular profile requires p_c < p < p_s");
    }
    if (!(r_max > 0.0)) throw DomainError("singular profile needs r_max > 0");
    const double g = 2.0 / (params.p - 1.0);
    const double A = std::pow(g * (params.d - 2.0 - g) / params.lambda, 1.0 / (params.p - 1.0));
    RadialProfile::Spec sp;
    sp.kind = ProfileKind::Singular;
    sp.role = ProfileRole::Solution;
    sp.params = params;
    sp.domain_end = r_max;
    sp.positivity_radius = r_max;
    sp.positive_on_domain = true;
    sp.singular_exponent = g;
    sp.center_value = A * std::pow(r_max, -g);
    sp.eval = [A, g](double r) {
        const double u = A * std::pow(r, -g);
        return Jet{u, -g * u / r, g * (g + 1.0) * u / (r * r)};
    };
    sp.label = "singular d=" + std::to_string(params.d) + " p=" + std::to_string(params.p);
    return RadialProfile(std::move(sp));
}

RadialProfile constant_stub(const ProblemParams& params, double c, double r_max) {
    if (!(c > 0.0)) throw DomainError("constant stub needs c > 0");
    RadialProfile::Spec sp;
    sp.kind = ProfileKind::Stub;
    sp.role = ProfileRole::NotASolution;
    sp.params = params;
    sp.domain_end = r_max;
    sp.positivity_radius = r_max;
    sp.center_value = c;
    sp.eval = [c](double) { return Jet{c, 0.0, 0.0}; };
    sp.label = "constant stub c=" + std::to_string(c);
    return RadialProfile(std::move(sp));
}

RadialProfile power_stub(const ProblemParams& params, double k, double r_max) {
    RadialProfile::Spec sp;
    sp.kind = ProfileKind::Stub;
    sp.role = ProfileRole::NotASolution;
    sp.params = params;
    sp.domain_end = r_max;
    sp.positivity_radius = r_max;
    sp.monotone_decreasing = k <= 0.0;
    sp.center_value = std::pow(r_max, k);
    sp.eval = [k](double r) {
        if (r == 0.0) return Jet{k == 0.0 ? 1.0 : 0.0, k == 1.0 ? 1.0 : 0.0, 0.0};
        const double u = std::pow(r, k);
        return Jet{u, k * u / r, k * (k - 1.0) * u / (r * r)};
    };
    sp.label = "power stub k=" + std::to_string(k);
    return RadialProfile(std::move(sp));
}

RadialProfile make_solution(const ProblemParams& params, double u0, const ShootingOptions& opt) {
    if (params.p == 0.0) return explicit_p0(params, u0);
    if (params.p == 1.0 && params.d == 3) return explicit_linear_d3(params.lambda, u0);
    return solve_lane_emden(params, u0, opt);
}

ResidualReport residual(const RadialProfile& profile, const std::vector<double>& r_grid) {
    const auto& pp = profile.params();
    ResidualReport rep;
    for (double r : r_grid) {
        if (r < 0.0 || r > profile.domain_end() * (1.0 + 1e-12) ||
            (profile.singular_at_origin() && r <= 0.0)) {
            throw GeometryError("residual grid leaves the validity interval");
        }
        const Jet j = profile.eval(r);
        const double src = pp.lambda * source(j.u, pp.p);
        double lap_terms, scale;
        if (r == 0.0) {
            lap_terms = pp.d * j.d2u;
            scale = std::fabs(lap_terms) + std::fabs(src);
        } else {
            const double first = (pp.d - 1) * j.du / r;
            lap_terms = j.d2u + first;
            scale = std::fabs(j.d2u) + std::fabs(first) + std::fabs(src);
        }
        const double res = std::fabs(lap_terms + src);
        const double rel = res / std::max(1.0, scale);
        rep.sup_abs = std::max(rep.sup_abs, res);
        if (rel > rep.sup_rel) {
            rep.sup_rel = rel;
            rep.at_r = r;
        }
    }
    return rep;
}

}  // namespace qlb
