#include "qlb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlb/cutoff.hpp"
#include "qlb/errors.hpp"
#include "qlb/regime.hpp"

namespace qlb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = 2.718281828459045235360287;

double s2_for(const RadialProfile& u, const VerifyOptions& opt) {
    return opt.s2 > 0.0 ? opt.s2 : sobolev_default(u.params().d);
}

CheckResult base(const std::string& name, const RadialProfile& u, const std::string& anchor) {
    CheckResult r;
    r.name = name;
    r.fixture = u.label();
    r.anchor = anchor;
    r.regime = regime_tag(u.params().d, u.params().p);
    r.status = CheckStatus::Inconclusive;
    return r;
}

CheckResult inapplicable(CheckResult r, const std::string& why) {
    r.status = CheckStatus::Inapplicable;
    r.reason = why;
    r.log_lhs = r.log_rhs = 0.0;
    return r;
}

// Largest radius on which the profile stays strictly positive and defined.
double usable_radius(const RadialProfile& u) {
    return u.positive_on_domain() ? u.domain_end() : u.positivity_radius();
}

std::optional<std::string> geometry_gap(const RadialProfile& u, double outer) {
    const double lim = usable_radius(u);
    const bool ok = u.positive_on_domain() ? outer <= lim * (1.0 + 1e-12) : outer < lim;
    if (!ok) {
        std::ostringstream os;
        os << "ball of radius " << outer << " reaches the zero set or domain end at " << lim;
        return os.str();
    }
    return std::nullopt;
}

// Table guard, solution guard, singularity guard and geometry guard, in that order.
std::optional<CheckResult> guard(const CheckResult& r, const RadialProfile& u, double outer, bool allow_singular,
                                 const std::string& table_name) {
    const Applicability a = applicability(table_name, u.params().d, u.params().p);
    if (!a.applicable) return inapplicable(r, a.reason);
    if (!u.is_solution()) return inapplicable(r, "profile is not a solution (" + to_string(u.role()) + ")");
    if (u.singular_at_origin() && !allow_singular)
        return inapplicable(r, "singular at the origin: unbounded on every ball containing it");
    if (auto g = geometry_gap(u, outer)) return inapplicable(r, *g);
    return std::nullopt;
}

double log_inf(const RadialProfile& u, double R) { return std::log(sup_inf(u, R).inf); }
double log_sup(const RadialProfile& u, double R) { return std::log(sup_inf(u, R).sup); }

// u + δ as a profile with no solution role.
RadialProfile shifted(const RadialProfile& u, double delta) {
    if (delta == 0.0) return u;
    RadialProfile::Spec s;
    s.kind = ProfileKind::Stub;
    s.role = ProfileRole::NotASolution;
    s.params = u.params();
    s.eval = [u, delta](double r) {
        Jet j = u.eval(r);
        j.u += delta;
        return j;
    };
    s.domain_end = u.domain_end();
    s.positivity_radius = u.domain_end();
    s.positive_on_domain = true;
    s.singular_exponent = u.singular_exponent();
    s.monotone_decreasing = u.monotone_decreasing();
    s.center_value = u.center_value() + delta;
    s.label = u.label() + "+delta";
    return RadialProfile(std::move(s));
}

NormValue require_finite(NormValue n, const std::string& what) {
    if (!n.finite()) throw RegimeError(what + " is not finite (" + to_string(n.status) + ")");
    return n;
}

}  // namespace

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inconclusive: return "inconclusive";
        case CheckStatus::Inapplicable: return "inapplicable";
    }
    return "unknown";
}

double CheckResult::lhs() const { return std::exp(log_lhs); }
double CheckResult::rhs() const { return std::exp(log_rhs); }
double CheckResult::margin() const { return std::exp(log_margin()); }

CheckStatus decide(double log_margin, double allowance) {
    if (std::isnan(log_margin)) return CheckStatus::Inconclusive;
    if (log_margin >= std::log1p(allowance)) return CheckStatus::Pass;
    if (allowance >= 1.0 || log_margin <= std::log1p(-allowance)) return CheckStatus::Fail;
    return CheckStatus::Inconclusive;
}

void finalize(CheckResult& r, const VerifyOptions& opt) {
    if (r.status == CheckStatus::Inapplicable) return;
    r.error_allowance = std::max(opt.min_allowance, r.lhs_rel_error + r.rhs_rel_error);
    r.status = decide(r.log_margin(), r.error_allowance);
}

RadiiChain default_chain(const RadialProfile& u) {
    const double rp = usable_radius(u);
    return RadiiChain{0.25 * rp, 0.5 * rp, 0.75 * rp, 0.875 * rp};
}

CheckResult check_energy_identity(const RadialProfile& u, const RadiiChain& chain, double alpha, double delta,
                                  const VerifyOptions& opt) {
    CheckResult r = base("energy_identity", u, "Energy estimates: local energy identity");
    r.parameters = {{"alpha", alpha}, {"delta", delta}, {"R1", chain.r_inf}, {"R0", chain.r0}};
    if (u.singular_at_origin()) return inapplicable(r, "singular profile: identity needs a W^{1,2} function");
    if (alpha == -1.0) return inapplicable(r, "alpha = -1 is excluded");
    if (delta == 0.0 && alpha <= -1.0) return inapplicable(r, "delta = 0 needs alpha > -1");
    if (auto g = geometry_gap(u, chain.r0)) return inapplicable(r, *g);
    const CutoffProfile phi = make_cutoff(chain.r_inf, chain.r0, u.params().d);
    const EnergySides s = energy_identity_sides(u, phi, alpha, delta, opt.norm);
    constexpr double tol = 1e-6;
    r.log_lhs = std::log(s.residual);
    r.log_rhs = std::log(tol);
    r.lhs_rel_error = s.abs_error / (std::fabs(s.lhs) + std::fabs(s.rhs) + 1.0) / std::max(s.residual, 1e-300);
    r.lhs_rel_error = std::min(r.lhs_rel_error, 0.5);
    r.parameters.push_back({"lhs", s.lhs});
    r.parameters.push_back({"rhs", s.rhs});
    r.notes.push_back("lhs/rhs of this check are the relative residual and its tolerance 1e-6");
    finalize(r, opt);
    return r;
}

CheckResult check_caccioppoli(const RadialProfile& u, const RadiiChain& chain, double delta,
                              const VerifyOptions& opt) {
    CheckResult r = base("caccioppoli", u, "Quantitative Caccioppoli estimates");
    const double R = chain.r_inf;
    r.parameters = {{"delta", delta}, {"R", R}, {"R0", chain.r0}};
    if (auto g = guard(r, u, chain.r0, true, "caccioppoli")) return *g;
    const ProblemParams& pp = u.params();
    const NormValue src = source_ratio_integral(u, delta, R, opt.norm);
    const NormValue grad = log_gradient_integral(u, delta, R, opt.norm);
    if (!src.finite() || !grad.finite()) return inapplicable(r, "left side integral is not finite");
    const double lhs = pp.lambda * src.value + grad.value;
    r.log_lhs = std::log(lhs);
    r.lhs_rel_error = (pp.lambda * src.abs_error + grad.abs_error) / lhs;
    r.log_rhs = caccioppoli_rhs(pp.d, chain.r0, R).log_value;
    finalize(r, opt);
    return r;
}

CheckResult check_caccioppoli_absolute(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt) {
    CheckResult r = base("caccioppoli_absolute", u, "Absolute upper bound for the local L^{p-1} norm");
    const double R = chain.r_inf;
    r.parameters = {{"R", R}, {"R0", chain.r0}};
    if (auto g = guard(r, u, chain.r0, true, "caccioppoli_absolute")) return *g;
    const ProblemParams& pp = u.params();
    const NormValue I = power_integral(u, pp.p - 1.0, R, opt.norm);
    if (!I.finite()) return inapplicable(r, "integral of u^{p-1} is not finite");
    r.log_lhs = std::log(pp.lambda) + I.log_value;
    r.lhs_rel_error = I.rel_error;
    r.log_rhs = caccioppoli_rhs(pp.d, chain.r0, R).log_value;
    finalize(r, opt);
    return r;
}

CheckResult check_upper(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q,
                        const VerifyOptions& opt) {
    CheckResult r = base("upper", u, "Local upper estimates");
    if (auto g = guard(r, u, chain.r0, false, "upper")) return *g;
    const ProblemParams& pp = u.params();
    const double q_req = q.value_or(pp.p + 1.0);
    if (!(q_req > q_bar(pp.d, pp.p))) return inapplicable(r, "q must exceed d(p-1)_+/2");
    const NudgeResult nq = nudge_q(pp.d, pp.p, q_req);
    if (nq.nudged) r.notes.push_back("q nudged from " + std::to_string(q_req) + " to keep the index non-integer");
    const double qq = nq.q;
    const double s2 = s2_for(u, opt);
    r.parameters = {{"q", qq}, {"R_inf", chain.r_inf}, {"R0", chain.r0}, {"S2", s2}};
    const ConstantValue I = upper_I_inf(pp, chain.rho(), qq, s2);
    const NormValue mq = mean_integral(u, qq, chain.r0, opt.norm);
    r.log_lhs = log_sup(u, chain.r_inf);
    if (pp.p > 1.0) {
        const double mu = pp.d / (2.0 * qq - pp.d * (pp.p - 1.0));
        const NormValue mp = mean_integral(u, pp.p - 1.0, chain.r_inf, opt.norm);
        const double e1 = (1.0 + (pp.p - 1.0) * mu) / qq;
        r.log_rhs = I.log_value + e1 * mq.log_value - mu * mp.log_value;
        r.rhs_rel_error = e1 * mq.rel_error + mu * mp.rel_error;
        r.parameters.push_back({"mu", mu});
    } else {
        r.log_rhs = I.log_value + mq.log_value / qq;
        r.rhs_rel_error = mq.rel_error / qq;
    }
    r.parameters.push_back({"log_I_inf", I.log_value});
    finalize(r, opt);
    return r;
}

CheckResult check_upper_second_form(const RadialProfile& u, const RadiiChain& chain, double q0,
                                    std::optional<double> r_over, const VerifyOptions& opt) {
    CheckResult r = base("upper_second_form", u, "Local upper bounds, second form");
    const double R = chain.outer();
    if (auto g = guard(r, u, R, false, "upper_second_form")) return *g;
    const ProblemParams& pp = u.params();
    const double s2 = s2_for(u, opt);
    SecondForm sf;
    const NormValue nq0 = lq_norm(u, q0, R, opt.norm);
    if (pp.p > 1.0) {
        const double qb = q_bar(pp.d, pp.p);
        const double rb = r_over.value_or(qb + 1.5);
        r.parameters = {{"q0", q0}, {"r_over", rb}, {"R_inf", chain.r_inf}, {"R0", chain.r0}, {"R", R}};
        if (!(rb > qb)) return inapplicable(r, "r_over must exceed d(p-1)/2");
        const NormValue un = lq_norm(u, rb, chain.r0, opt.norm);
        if (!un.finite()) return inapplicable(r, "norm of u in L^{r_over} is not finite");
        sf = second_form_bracket(pp, chain.r_inf, chain.r0, R, q0, rb, un.value, s2);
        r.rhs_rel_error = nq0.rel_error + un.rel_error * sf.norm_exponent * pp.d / (2.0 * q0);
    } else {
        // b = λu^{p-1} is bounded on B_R0 because u stays positive there
        const double b_norm = pp.p == 1.0 ? pp.lambda : pp.lambda * std::pow(sup_inf(u, chain.r0).inf, pp.p - 1.0);
        r.parameters = {{"q0", q0}, {"r", kInf}, {"b_norm", b_norm}, {"R_inf", chain.r_inf}, {"R0", chain.r0},
                        {"R", R}};
        sf = unbounded_coefficient_bracket(pp.d, chain.r_inf, chain.r0, R, q0, kInf, b_norm, s2);
        r.anchor = "Local upper bounds, unbounded coefficient";
        r.rhs_rel_error = nq0.rel_error;
    }
    r.log_lhs = log_sup(u, chain.r_inf);
    r.log_rhs = sf.log_multiplier + nq0.log_value;
    r.notes.push_back(std::string("A-constant branch: ") + (sf.a.superlinear_branch ? "q0>1" : "0<q0<=1"));
    finalize(r, opt);
    return r;
}

CheckResult check_lower(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q,
                        const VerifyOptions& opt) {
    CheckResult r = base("lower", u, "Local lower estimates");
    if (auto g = guard(r, u, chain.r0, false, "lower")) return *g;
    const ProblemParams& pp = u.params();
    const double q0 = q0_threshold(pp.d, opt.eps);
    const double qq = q.value_or(0.5 * q0);
    const double s2 = s2_for(u, opt);
    r.parameters = {{"q", qq}, {"eps", opt.eps}, {"q0", q0}, {"R_inf", chain.r_inf}, {"R0", chain.r0}, {"S2", s2}};
    if (!(qq > 0.0 && qq <= q0)) return inapplicable(r, "q must lie in (0, q0(d,eps)]");
    const ConstantValue I = lower_I(pp.d, qq, opt.eps, chain.r0, chain.r_inf, s2);
    const NormValue m = mean_norm(u, qq, chain.r0, opt.norm);
    // lower bound: I·mean <= inf, so lhs is the bound and rhs the infimum
    r.log_lhs = I.log_value + m.log_value;
    r.lhs_rel_error = m.rel_error;
    r.log_rhs = log_inf(u, chain.r_inf);
    finalize(r, opt);
    return r;
}

CheckResult check_lower_pc(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q_over,
                           const VerifyOptions& opt) {
    CheckResult r = base("lower_pc", u, "Local lower estimates when 1<p<p_c");
    if (auto g = guard(r, u, chain.r0, false, "lower_pc")) return *g;
    const ProblemParams& pp = u.params();
    ExponentWindow hint;
    hint.q_over = q_over;
    const ExponentWindow w = harnack_window(pp, hint);
    const double s2 = s2_for(u, opt);
    const double R_bar = chain.r_bar.value_or(0.5 * (chain.r_inf + chain.r0));
    r.parameters = {{"q_over", *w.q_over}, {"q_under", *w.q_under}, {"R_inf", chain.r_inf}, {"R_bar", R_bar},
                    {"R0", chain.r0}, {"S2", s2}};
    const double li = lower_I(pp.d, *w.q_under, kE, chain.r0, chain.r_inf, s2).log_value;
    const double ri =
        rev_holder_I(pp.d, pp.p, *w.q_over, *w.q_under, R_bar, chain.r0, s2, RevHolderForm::LowerBound).log_value;
    const NormValue m = mean_norm(u, *w.q_over, R_bar, opt.norm);
    r.log_lhs = li - ri + m.log_value;
    r.lhs_rel_error = m.rel_error;
    r.log_rhs = log_inf(u, chain.r_inf);
    finalize(r, opt);
    return r;
}

CheckResult check_rev_holder(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q, double delta,
                             const VerifyOptions& opt) {
    CheckResult r = base("rev_holder", u, "Reverse Holder inequalities for supersolutions");
    // A positive constant satisfies the inequality outright, so it is accepted without the solution role.
    const bool constant = u.kind() == ProfileKind::Stub && u.eval(u.domain_end()).du == 0.0 &&
                          u.u(u.domain_end()) == u.center_value();
    if (constant) {
        const Applicability a = applicability("rev_holder", u.params().d, u.params().p);
        if (!a.applicable) return inapplicable(r, a.reason);
        if (auto g = geometry_gap(u, chain.r0)) return inapplicable(r, *g);
        r.notes.push_back("constant profile: evaluated as a property, not as a supersolution");
    } else if (auto g = guard(r, u, chain.r0, false, "rev_holder")) {
        return *g;
    }
    const ProblemParams& pp = u.params();
    const double dd = pp.d;
    const double q0 = q0_threshold(dd, opt.eps);
    const double qq = q.value_or(q0);
    r.parameters = {{"q", qq}, {"delta", delta}, {"eps", opt.eps}, {"R0", chain.r0}};
    if (!(qq > 0.0 && qq <= q0 * (1.0 + 1e-12))) return inapplicable(r, "q must lie in (0, q0(d,eps)]");
    const RadialProfile v = shifted(u, delta);
    const NormValue mp = mean_norm(v, qq, chain.r0, opt.norm);
    const NormValue mm = mean_norm(v, -qq, chain.r0, opt.norm);
    const double k = opt.eps / (std::pow(2.0, dd) * (kE * dd + opt.eps));
    r.log_lhs = 2.0 / qq * std::log(k) + mp.log_value;
    r.lhs_rel_error = mp.rel_error;
    r.log_rhs = mm.log_value;
    r.rhs_rel_error = mm.rel_error;
    finalize(r, opt);
    return r;
}

CheckResult check_rev_holder_pc(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q_over,
                                std::optional<double> q0, const VerifyOptions& opt) {
    CheckResult r = base("rev_holder_pc", u, "Reverse Holder inequalities for 1<p<p_c");
    if (auto g = guard(r, u, chain.r0, false, "rev_holder_pc")) return *g;
    const ProblemParams& pp = u.params();
    ExponentWindow hint;
    hint.q_over = q_over;
    const ExponentWindow w = harnack_window(pp, hint);
    const double qo = *w.q_over;
    const double qz = q0.value_or(qo);
    const double s2 = s2_for(u, opt);
    const double R_bar = chain.r_bar.value_or(0.5 * (chain.r_inf + chain.r0));
    r.parameters = {{"q_over", qo}, {"q0", qz}, {"R_bar", R_bar}, {"R0", chain.r0}, {"S2", s2}};
    if (!(qz > 0.0 && qz <= qo)) return inapplicable(r, "q0 must lie in (0, q_over]");
    const ConstantValue I = rev_holder_I(pp.d, pp.p, qo, qz, R_bar, chain.r0, s2, RevHolderForm::PcRange);
    const NormValue top = mean_norm(u, qo, R_bar, opt.norm);
    const NormValue bot = mean_norm(u, qz, chain.r0, opt.norm);
    r.log_lhs = top.log_value;
    r.lhs_rel_error = top.rel_error;
    r.log_rhs = I.log_value + bot.log_value;
    r.rhs_rel_error = bot.rel_error;
    r.notes.push_back(I.regime);
    finalize(r, opt);
    return r;
}

CheckResult check_harnack(const RadialProfile& u, const RadiiChain& chain, const ExponentWindow& window,
                          const VerifyOptions& opt) {
    CheckResult r = base("harnack", u, "Harnack inequality");
    const ProblemParams& pp = u.params();
    const CriticalExponents ce = critical_exponents(pp.d);
    if (u.singular_at_origin() && pp.p >= ce.p_c && pp.p < ce.p_s) {
        const ExponentWindow w = harnack_window(pp, window);
        const DivergenceResult dv = divergence_probe(u, *w.q_over, chain.r0);
        if (dv.status == Finiteness::Divergent)
            return inapplicable(r, "required norm of u^{q_over} on B_R0 diverges for the singular profile");
    }
    if (auto g = guard(r, u, chain.r0, false, "harnack")) return *g;
    const double s2 = s2_for(u, opt);
    std::optional<HarnackNorms> norms;
    ExponentWindow w = window;
    w.eps = opt.eps;
    if (pp.p >= ce.p_c) {
        w = harnack_window(pp, w);
        HarnackNorms n;
        const NormValue a = mean_integral(u, *w.q_over, chain.r0, opt.norm);
        const NormValue b = mean_integral(u, *w.q_under, chain.r0, opt.norm);
        const NormValue c = mean_integral(u, pp.p - 1.0, chain.r_inf, opt.norm);
        n.log_mean_q_over_R0 = require_finite(a, "mean of u^{q_over}").log_value;
        n.log_mean_q_under_R0 = require_finite(b, "mean of u^{q_under}").log_value;
        n.log_mean_pm1_Rinf = require_finite(c, "mean of u^{p-1}").log_value;
        norms = n;
        r.rhs_rel_error = a.rel_error + b.rel_error + c.rel_error;
    }
    const HarnackValue h = harnack_constant(pp, chain, w, norms, s2);
    const SupInf si = sup_inf(u, chain.r_inf);
    r.anchor = h.anchor;
    r.log_lhs = std::log(si.sup);
    r.log_rhs = h.log_value + std::log(si.inf);
    r.parameters = {{"log_H", h.log_value}, {"q_over", h.q_over}, {"q_under", h.q_under}, {"R_inf", chain.r_inf},
                    {"R0", chain.r0}, {"S2", s2}};
    if (h.n0) r.parameters.push_back({"n0", double(*h.n0)});
    for (const auto& wmsg : h.warnings) r.notes.push_back(wmsg);
    r.notes.push_back("constant regime: " + to_string(h.regime));
    finalize(r, opt);
    return r;
}

CheckResult check_absolute(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt) {
    CheckResult r = base("absolute", u, "Local absolute bounds");
    if (auto g = guard(r, u, chain.r0, false, "absolute")) return *g;
    const ProblemParams& pp = u.params();
    const double s2 = s2_for(u, opt);
    ExponentWindow w;
    w.eps = opt.eps;
    const AbsoluteBounds ab = absolute_bounds(pp, chain, w, s2);
    const SupInf si = sup_inf(u, chain.r_inf);
    r.parameters = {{"R", chain.r_inf}, {"R0", chain.r0}, {"S2", s2}, {"log_H", ab.harnack->log_value}};
    if (ab.log_upper) {
        r.log_lhs = std::log(si.sup);
        r.log_rhs = *ab.log_upper;
        r.notes.push_back("sup <= absolute ceiling");
    } else {
        r.log_lhs = *ab.log_lower;
        r.log_rhs = std::log(si.inf);
        r.notes.push_back("absolute floor <= inf");
    }
    finalize(r, opt);
    return r;
}

CheckResult check_gradient(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt) {
    CheckResult r = base("gradient", u, "Local upper bounds for the gradient");
    if (auto g = guard(r, u, chain.r0, false, "gradient")) return *g;
    const ProblemParams& pp = u.params();
    const CriticalExponents ce = critical_exponents(pp.d);
    const double s2 = s2_for(u, opt);
    std::optional<double> log_h;
    std::optional<double> sup_norm;
    if (pp.p < ce.p_c && pp.p != 1.0) {
        ExponentWindow w;
        w.eps = opt.eps;
        log_h = harnack_constant(pp, chain, w, std::nullopt, s2).log_value;
    } else if (pp.p >= ce.p_c) {
        sup_norm = sup_inf(u, chain.r0).sup;
    }
    const double log_bp = log_bp_bound(pp, chain, log_h, sup_norm);
    const ConstantValue K = gradient_K_log(pp, chain, log_bp, s2);
    const NormValue n2 = lq_norm(u, 2.0, chain.r0, opt.norm);
    r.log_lhs = std::log(sup_inf(u, chain.r_inf).sup_grad);
    r.log_rhs = K.log_value + n2.log_value;
    r.rhs_rel_error = n2.rel_error;
    r.parameters = {{"log_b_p", log_bp}, {"log_K", K.log_value}, {"R_inf", chain.r_inf}, {"R0", chain.r0}, {"S2", s2}};
    finalize(r, opt);
    return r;
}

CheckResult check_gradient_absolute(const RadialProfile& u, const RadiiChain& chain, const VerifyOptions& opt) {
    CheckResult r = base("gradient_absolute", u, "Local absolute bounds for the gradient when 1<p<p_c");
    if (auto g = guard(r, u, chain.r0, false, "gradient_absolute")) return *g;
    const ProblemParams& pp = u.params();
    const double s2 = s2_for(u, opt);
    ExponentWindow w;
    w.eps = opt.eps;
    const double log_h = harnack_constant(pp, chain, w, std::nullopt, s2).log_value;
    const ConstantValue K = gradient_K_absolute(pp, chain, log_h, s2);
    const ConstantValue Kp = gradient_K_absolute_variant(pp, chain, log_h, s2);
    r.log_lhs = std::log(sup_inf(u, chain.r_inf).sup_grad);
    r.log_rhs = K.log_value;
    r.parameters = {{"log_K", K.log_value}, {"log_K_variant", Kp.log_value}, {"log_H", log_h},
                    {"R_inf", chain.r_inf}, {"R0", chain.r0}, {"S2", s2}};
    finalize(r, opt);
    return r;
}

MoserSchedule moser_schedule(int d, double p, double beta0, double R0, double R_inf, int n_max) {
    const double dd = d;
    const double pp = positive_part(p - 1.0);
    if (!(beta0 > pp * (dd - 2.0) / 2.0)) throw RegimeError("beta0 must exceed (p-1)_+(d-2)/2");
    if (!(R_inf > 0.0 && R_inf < R0)) throw GeometryError("need 0 < R_inf < R0");
    const double ratio = dd / (dd - 2.0);
    auto beta = [&](int n) { return std::pow(ratio, n) * (beta0 - pp * (dd - 2.0) / 2.0) + pp * (dd - 2.0) / 2.0; };
    MoserSchedule s;
    for (int n = 0; n <= n_max; ++n) s.beta.push_back(beta(n));
    // c0 = (Σ_{k>=1} β_k^{-1/2})^{-1}; terms decay geometrically
    double sum = 0.0;
    for (int k = 1; k < 100000; ++k) {
        const double t = 1.0 / std::sqrt(beta(k));
        sum += t;
        if (t < 1e-18 * sum) break;
    }
    s.c0 = 1.0 / sum;
    const double gap = R0 - R_inf;
    s.radii.push_back(R0);
    for (int k = 1; k <= n_max; ++k) s.radii.push_back(s.radii.back() - gap * s.c0 / std::sqrt(beta(k)));
    s.gap_total = gap * s.c0 * sum;
    return s;
}

std::vector<CheckResult> moser_trace(const RadialProfile& u, const RadiiChain& chain, std::optional<double> q,
                                     int n_max, const VerifyOptions& opt) {
    CheckResult proto = base("moser_trace", u, "Moser iteration, single step");
    if (auto g = guard(proto, u, chain.r0, false, "moser_trace")) return {*g};
    const ProblemParams& pp = u.params();
    const double dd = pp.d;
    const double pm = positive_part(pp.p - 1.0);
    const double q_req = q.value_or(pp.p + 1.0);
    if (!(q_req > q_bar(pp.d, pp.p))) return {inapplicable(proto, "q must exceed d(p-1)_+/2")};
    const double qq = nudge_q(pp.d, pp.p, q_req).q;
    const double beta0 = qq * (dd - 2.0) / dd;
    const MoserSchedule s = moser_schedule(pp.d, pp.p, beta0, chain.r0, chain.r_inf, n_max);
    const double s2 = s2_for(u, opt);
    const double half_star = dd / (dd - 2.0);
    std::vector<CheckResult> out;
    for (int n = 1; n <= n_max; ++n) {
        CheckResult r = proto;
        const double bn = s.beta[n];
        const double Rn = s.radii[n];
        const double Rm = s.radii[n - 1];
        r.parameters = {{"n", double(n)}, {"beta_n", bn}, {"R_n", Rn}, {"R_n-1", Rm}, {"q", qq}, {"S2", s2}};
        if (std::fabs(bn - 1.0) < kIntegerTol) {
            out.push_back(inapplicable(r, "beta_n = 1 on this schedule; step skipped"));
            continue;
        }
        const NormValue top = power_integral(u, half_star * bn, Rn, opt.norm);
        const NormValue bot = power_integral(u, bn + pm, Rm, opt.norm);
        // ∫u^0 is the ball volume
        const NormValue den = pm > 0.0 ? power_integral(u, pm, Rm, opt.norm) : NormValue{0.0, log_omega(dd) + dd * std::log(Rm)};
        const double gap = Rm - Rn;
        const double log_vol = log_omega(dd) + dd * std::log(Rm);
        const double bracket = (lambda_p(pp.p, pp.lambda) * bn * bn + dd * bn) / std::fabs(bn - 1.0) +
                               gap * gap / (Rn * Rn);
        const double log_In = 2.0 * std::log(s2) - 2.0 * std::log(gap) + log_vol - den.log_value + std::log(bracket);
        r.log_lhs = top.log_value / (half_star * bn);
        r.lhs_rel_error = top.rel_error / (half_star * bn);
        r.log_rhs = (log_In + bot.log_value) / bn;
        r.rhs_rel_error = (bot.rel_error + den.rel_error) / bn;
        r.parameters.push_back({"log_I_n", log_In});
        finalize(r, opt);
        out.push_back(r);
    }
    return out;
}

CheckResult counterexample_singular(const ProblemParams& params, const RadiiChain& chain, const VerifyOptions&) {
    validate(params);
    const RadialProfile u = singular_profile(params, chain.outer());
    CheckResult r = base("counterexample", u, "Singular solutions for p_c<p<p_s");
    const Applicability a = applicability("counterexample", params.d, params.p);
    if (!a.applicable) return inapplicable(r, a.reason);
    const double thr = params.d * (params.p - 1.0) / 2.0;
    int total = 0, ok = 0;
    auto expect = [&](bool cond, const std::string& what) {
        ++total;
        if (cond) ++ok;
        else r.notes.push_back("violated: " + what);
    };
    std::vector<double> qs = {thr, thr + 0.5, thr - 0.1, thr - 0.5};
    for (double qv : qs) {
        if (!(qv > 0.0)) continue;
        const DivergenceResult dv = divergence_probe(u, qv, chain.r0);
        const bool want_div = qv >= thr;
        expect(want_div ? dv.status == Finiteness::Divergent : dv.status == Finiteness::Finite,
               "q=" + std::to_string(qv) + " classified " + to_string(dv.status));
        r.parameters.push_back({"growth_q=" + std::to_string(qv), dv.growth});
    }
    expect(sup_inf(u, chain.r_inf).sup_divergent, "sup on B_R_inf is unbounded");
    const ResidualReport res = residual(u, uniform_grid(1e-3, std::min(1.0, u.domain_end()), 2001));
    expect(res.sup_rel <= 1e-8, "residual <= 1e-8 on [1e-3, 1]");
    const ExponentWindow w = harnack_window(params, {});
    const DivergenceResult hv = divergence_probe(u, *w.q_over, chain.r0);
    expect(hv.status == Finiteness::Divergent, "norm required by the general Harnack constant diverges");
    r.parameters.push_back({"threshold_q", thr});
    r.parameters.push_back({"residual", res.sup_rel});
    r.log_lhs = std::log(double(total));
    r.log_rhs = std::log(double(ok));
    r.status = ok == total ? CheckStatus::Pass : CheckStatus::Fail;
    r.notes.push_back("lhs/rhs count the asserted properties and those that held");
    return r;
}

}  // namespace qlb
