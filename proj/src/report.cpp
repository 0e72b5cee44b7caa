#include "qlb/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <unistd.h>

#include "qlb/errors.hpp"
#include "qlb/regime.hpp"

namespace qlb {

using nlohmann::ordered_json;

namespace {

const double kLn10 = std::log(10.0);

ordered_json opt_num(const std::optional<double>& x) { return x ? finite_or_null(*x) : ordered_json(nullptr); }

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

bool any_radius(const RunConfig& c) { return c.r_inf || c.r_bar || c.r0 || c.r; }

}  // namespace

std::string to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    throw DomainError("unknown format '" + s + "' (expected json or csv)");
}

ordered_json finite_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["problem"] = {{"d", c.problem.d}, {"p", c.problem.p}, {"lambda", c.problem.lambda}};
    j["u0"] = opt_num(c.u0);
    j["singular"] = c.singular;
    j["chain"] = {{"r_inf", opt_num(c.r_inf)}, {"r_bar", opt_num(c.r_bar)}, {"r0", opt_num(c.r0)}, {"r", opt_num(c.r)}};
    j["window"] = {{"q", opt_num(c.window.q)},
                   {"q_over", opt_num(c.window.q_over)},
                   {"q_under", opt_num(c.window.q_under)},
                   {"eps", c.window.eps}};
    j["tol"] = {{"shooting", c.tol}, {"quadrature", c.quad_tol}};
    j["s2_override"] = opt_num(c.s2_override);
    j["output"] = {{"format", to_string(c.format)}, {"path", c.out}};
    j["jobs"] = c.jobs;
    j["perturbation"] = c.perturbation;
    j["selection"] = c.selection;
    j["moser_steps"] = c.moser_steps;
    if (c.sweep) {
        const SweepGrid& g = *c.sweep;
        j["sweep"] = {{"default_grid", g.default_grid}, {"ds", g.ds},         {"ps", g.ps},
                      {"lambdas", g.lambdas},          {"u0s", g.u0s},       {"scales", g.scales}};
    }
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const RunConfig& c) {
    // output location and worker count do not change results
    RunConfig k = c;
    k.out.clear();
    k.jobs = 0;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(k).dump())));
    return buf;
}

RadiiChain chain_from_config(const RunConfig& c, double scale) {
    if (!any_radius(c)) return {0.25 * scale, 0.5 * scale, 0.75 * scale, 0.875 * scale};
    if (!c.r_inf || !c.r0) throw GeometryError("explicit radii need at least --r-inf and --r0");
    RadiiChain ch;
    ch.r_inf = *c.r_inf;
    ch.r0 = *c.r0;
    ch.r_bar = c.r_bar ? *c.r_bar : 0.5 * (ch.r_inf + ch.r0);
    ch.r = c.r;
    return ch;
}

SuiteOptions suite_options(const RunConfig& c) {
    SuiteOptions o;
    o.verify.eps = c.window.eps;
    o.verify.norm.rel_tol = c.quad_tol;
    if (c.s2_override) o.verify.s2 = *c.s2_override;
    o.selection = c.selection;
    o.jobs = c.jobs;
    o.moser_steps = c.moser_steps;
    o.q = c.window.q;
    o.perturbation = c.perturbation;
    o.shooting.tol = c.tol;
    if (any_radius(c)) o.chain = chain_from_config(c, 1.0);
    return o;
}

void validate(const RunConfig& c) {
    validate(c.problem);
    if (any_radius(c)) validate(chain_from_config(c, 1.0));
    if (c.u0 && !(*c.u0 > 0.0)) throw DomainError("u0 must be positive");
    if (!(c.tol > 0.0) || !(c.quad_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (c.s2_override && !(*c.s2_override > 0.0)) throw DomainError("S2 override must be positive");
    if (!(c.window.eps > 0.0)) throw DomainError("eps must be positive");
    if (c.jobs < 0) throw DomainError("jobs must be nonnegative");
    if (!(c.perturbation > -1.0)) throw DomainError("perturbation must exceed -1");
    if (c.moser_steps < 0) throw DomainError("moser steps must be nonnegative");
    for (const auto& s : c.selection) applicability(s, c.problem.d, c.problem.p);
}

ordered_json to_json(const CheckResult& r) {
    ordered_json j;
    j["name"] = r.name;
    j["fixture"] = r.fixture;
    j["status"] = to_string(r.status);
    j["reason"] = r.reason;
    j["regime"] = r.regime;
    j["anchor"] = r.anchor;
    const bool measured = r.status != CheckStatus::Inapplicable;
    auto num = [&](double x) { return measured ? finite_or_null(x) : ordered_json(nullptr); };
    j["lhs"] = num(r.lhs());
    j["rhs"] = num(r.rhs());
    j["margin"] = num(r.margin());
    j["log10_lhs"] = num(r.log_lhs / kLn10);
    j["log10_rhs"] = num(r.log_rhs / kLn10);
    j["log10_margin"] = num(r.log_margin() / kLn10);
    j["lhs_rel_error"] = num(r.lhs_rel_error);
    j["rhs_rel_error"] = num(r.rhs_rel_error);
    j["error_allowance"] = num(r.error_allowance);
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : r.parameters) params[k] = finite_or_null(v);
    j["parameters"] = params;
    j["notes"] = r.notes;
    return j;
}

ordered_json to_json(const Summary& s) {
    ordered_json j;
    j["pass"] = s.pass;
    j["fail"] = s.fail;
    j["inapplicable"] = s.inapplicable;
    j["inconclusive"] = s.inconclusive;
    j["worst_margin"] = s.has_worst ? finite_or_null(std::exp(s.worst_log_margin)) : ordered_json(nullptr);
    j["worst_log10_margin"] = s.has_worst ? finite_or_null(s.worst_log_margin / kLn10) : ordered_json(nullptr);
    j["worst_check"] = s.worst_check;
    return j;
}

ordered_json verify_report(const RunConfig& c, const std::vector<CheckResult>& results) {
    ordered_json j;
    j["config"] = to_json(c);
    j["config_hash"] = config_hash(c);
    ordered_json arr = ordered_json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    j["results"] = arr;
    j["summary"] = to_json(summarize(results));
    return j;
}

ordered_json per_check_summary(const std::vector<CheckResult>& results) {
    std::map<std::string, std::vector<CheckResult>> by_name;
    for (const auto& r : results) by_name[r.name].push_back(r);
    ordered_json j = ordered_json::object();
    for (const auto& [name, rs] : by_name) j[name] = to_json(summarize(rs));
    return j;
}

ordered_json sweep_report(const RunConfig& c, const std::vector<CheckResult>& results) {
    ordered_json j = verify_report(c, results);
    j["per_check"] = per_check_summary(results);
    return j;
}

std::string results_csv(const RunConfig& c, const std::vector<CheckResult>& results) {
    std::ostringstream os;
    os << "# config_hash=" << config_hash(c) << " command=" << c.command << "\n";
    os << "name,fixture,status,regime,log10_lhs,log10_rhs,log10_margin,error_allowance,reason\n";
    for (const auto& r : results) {
        const bool m = r.status != CheckStatus::Inapplicable;
        std::string reason = r.reason;
        for (char& ch : reason)
            if (ch == ',' || ch == '\n') ch = ';';
        os << r.name << ',' << r.fixture << ',' << to_string(r.status) << ',' << r.regime << ','
           << (m ? fmt(r.log_lhs / kLn10) : "") << ',' << (m ? fmt(r.log_rhs / kLn10) : "") << ','
           << (m ? fmt(r.log_margin() / kLn10) : "") << ',' << (m ? fmt(r.error_allowance) : "") << ','
           << reason << "\n";
    }
    return os.str();
}

namespace {

ordered_json constant_entry(const ConstantValue& v) {
    ordered_json j;
    j["name"] = v.name;
    j["applicable"] = true;
    j["value"] = finite_or_null(v.value());
    j["log10_value"] = finite_or_null(v.log10_value());
    j["regime"] = v.regime;
    j["anchor"] = v.anchor;
    j["reason"] = "";
    ordered_json echo = ordered_json::object();
    for (const auto& [k, x] : v.echo) echo[k] = finite_or_null(x);
    j["inputs"] = echo;
    return j;
}

ordered_json missing_entry(const std::string& name, const std::string& anchor, const std::string& reason) {
    ordered_json j;
    j["name"] = name;
    j["applicable"] = false;
    j["value"] = nullptr;
    j["log10_value"] = nullptr;
    j["regime"] = "";
    j["anchor"] = anchor;
    j["reason"] = reason;
    j["inputs"] = ordered_json::object();
    return j;
}

ConstantValue from_log(std::string name, double log_value, std::string regime, std::string anchor,
                       std::vector<std::pair<std::string, double>> echo) {
    ConstantValue v;
    v.name = std::move(name);
    v.log_value = log_value;
    v.regime = std::move(regime);
    v.anchor = std::move(anchor);
    v.echo = std::move(echo);
    return v;
}

}  // namespace

ordered_json constants_report(const RunConfig& c) {
    validate(c);
    const ProblemParams& pp = c.problem;
    const RadiiChain ch = chain_from_config(c, 1.0);
    const double s2 = sobolev_constant(pp.d, c.s2_override);
    const CriticalExponents ce = critical_exponents(pp.d, pp.p);
    const double eps = c.window.eps;

    ordered_json out;
    out["config"] = to_json(c);
    out["config_hash"] = config_hash(c);
    out["regime"] = regime_tag(pp.d, pp.p);
    out["critical_exponents"] = {{"two_star", ce.two_star}, {"p_c", ce.p_c}, {"p_s", ce.p_s},
                                 {"p_1", ce.p_1}, {"q_bar", opt_num(ce.q_bar)}};
    out["radii"] = {{"r_inf", ch.r_inf}, {"r_bar", opt_num(ch.r_bar)}, {"r0", ch.r0}, {"r", opt_num(ch.r)}};
    ordered_json list = ordered_json::array();

    // table-gated entry; regime errors from the formula itself are reported the same way
    auto add = [&](const std::string& name, const std::string& check, const std::string& anchor,
                   const std::function<ConstantValue()>& fn) {
        if (!check.empty()) {
            const Applicability a = applicability(check, pp.d, pp.p);
            if (!a.applicable) {
                list.push_back(missing_entry(name, anchor, a.reason));
                return;
            }
        }
        try {
            ConstantValue v = fn();
            v.name = name;
            list.push_back(constant_entry(v));
        } catch (const RegimeError& e) {
            list.push_back(missing_entry(name, anchor, e.what()));
        }
    };

    add("S2", "", "Sobolev inequality on balls", [&] {
        return from_log("S2", std::log(s2), "d>=3", "Sobolev inequality on balls", {{"d", double(pp.d)}});
    });
    add("caccioppoli_rhs", "caccioppoli", "Quantitative Caccioppoli estimates",
        [&] { return caccioppoli_rhs(pp.d, ch.r0, ch.r_inf); });
    add("I_inf", "upper", "Local upper estimates", [&] {
        const double q = nudge_q(pp.d, pp.p, c.window.q.value_or(pp.p + 1.0)).q;
        return upper_I_inf(pp, ch.rho(), q, s2);
    });
    add("q0_threshold", "lower", "Local lower estimates", [&] {
        return from_log("q0_threshold", std::log(q0_threshold(pp.d, eps)), "d>=3", "Local lower estimates",
                        {{"d", double(pp.d)}, {"eps", eps}});
    });
    add("I_minus_inf", "lower", "Local lower estimates",
        [&] { return lower_I(pp.d, 0.5 * q0_threshold(pp.d, eps), eps, ch.r0, ch.r_inf, s2); });
    add("I_rev_holder_pc", "rev_holder_pc", "Reverse Hoelder inequalities for 1<p<p_c", [&] {
        const ExponentWindow w = harnack_window(pp, c.window);
        return rev_holder_I(pp.d, pp.p, *w.q_over, *w.q_under, *ch.r_bar, ch.r0, s2, RevHolderForm::PcRange);
    });
    add("H_p", "harnack", "Harnack inequality", [&] {
        if (pp.p >= ce.p_c && pp.p < ce.p_s)
            throw RegimeError("depends on norms of u for p_c<=p<p_s; evaluated per solution by verify");
        const HarnackValue h = harnack_constant(pp, ch, c.window, std::nullopt, s2);
        return from_log("H_p", h.log_value, to_string(h.regime), h.anchor,
                        {{"q_over", h.q_over}, {"q_under", h.q_under}, {"R_inf", ch.r_inf}, {"R0", ch.r0}});
    });
    const AbsoluteBounds ab = [&] {
        try {
            return absolute_bounds(pp, ch, c.window, s2);
        } catch (const RegimeError& e) {
            AbsoluteBounds a;
            a.reason = e.what();
            return a;
        }
    }();
    const std::string abs_anchor = "Local absolute bounds";
    if (ab.log_upper)
        list.push_back(constant_entry(from_log("absolute_upper", *ab.log_upper, ab.reason, abs_anchor,
                                               {{"R_inf", ch.r_inf}, {"R0", ch.r0}})));
    else
        list.push_back(missing_entry("absolute_upper", abs_anchor, ab.log_lower ? "No" : ab.reason));
    if (ab.log_lower)
        list.push_back(constant_entry(from_log("absolute_lower", *ab.log_lower, ab.reason, abs_anchor,
                                               {{"R_inf", ch.r_inf}, {"R0", ch.r0}})));
    else
        list.push_back(missing_entry("absolute_lower", abs_anchor, ab.log_upper ? "No" : ab.reason));
    add("K_gradient_absolute", "gradient_absolute", "Local absolute bounds for the gradient when 1<p<p_c", [&] {
        const HarnackValue h = harnack_constant(pp, ch, c.window, std::nullopt, s2);
        return gradient_K_absolute(pp, ch, h.log_value, s2);
    });
    out["constants"] = list;
    return out;
}

Q0Scan q0_scan(double eps, double d_lo, double d_hi, double step) {
    if (!(step > 0.0)) throw DomainError("scan step must be positive");
    if (!(d_hi >= d_lo) || !(d_lo >= 1.0)) throw DomainError("scan range must satisfy 1 <= d_lo <= d_hi");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    Q0Scan s;
    const long n = std::lround(std::floor((d_hi - d_lo) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) {
        const double d = d_lo + double(i) * step;
        const double q = q0_threshold(d, eps);
        s.rows.emplace_back(d, q);
        if (i == 0 || q < s.min_q0) {
            s.min_q0 = q;
            s.argmin_d = d;
        }
    }
    return s;
}

std::string q0_scan_csv(const Q0Scan& s, double eps, const std::string& hash) {
    std::ostringstream os;
    os << "# config_hash=" << hash << " eps=" << fmt(eps) << " argmin_d=" << fmt(s.argmin_d)
       << " min_q0=" << fmt(s.min_q0) << "\n";
    os << "d,q0\n";
    for (const auto& [d, q] : s.rows) os << fmt(d) << ',' << fmt(q) << "\n";
    return os.str();
}

namespace {

struct ProfileRange {
    double lo = 0.0;
    double hi = 0.0;
    std::string note;
    ResidualReport res;
};

ProfileRange profile_range(const RadialProfile& u, double r_max, int n) {
    if (n < 2) throw DomainError("need at least two rows");
    ProfileRange pr;
    pr.hi = r_max > 0.0 ? r_max : u.domain_end();
    const double limit = std::min(u.domain_end(), u.positivity_radius());
    if (pr.hi > limit) {
        pr.note = "r_max " + fmt(pr.hi) + " truncated at the positivity radius " + fmt(limit);
        pr.hi = limit;
    }
    pr.lo = u.singular_at_origin() ? 1e-3 * pr.hi : 0.0;
    pr.res = residual(u, uniform_grid(std::max(pr.lo, 1e-3 * pr.hi), 0.999 * pr.hi, 400));
    return pr;
}

}  // namespace

std::string profile_csv(const RadialProfile& u, double r_max, int n, const std::string& hash, std::string* note) {
    const ProfileRange pr = profile_range(u, r_max, n);
    std::ostringstream os;
    os << "# config_hash=" << hash << " kind=" << to_string(u.kind()) << " residual_sup_rel=" << fmt(pr.res.sup_rel)
       << " at_r=" << fmt(pr.res.at_r);
    if (!pr.note.empty()) os << " note=" << pr.note;
    os << "\n";
    os << "r,u,du_dr\n";
    for (const auto& s : u.tabulate(pr.lo, pr.hi, n)) os << fmt(s.r) << ',' << fmt(s.u) << ',' << fmt(s.du) << "\n";
    if (note) *note = pr.note;
    return os.str();
}

ordered_json profile_report(const RunConfig& c, const RadialProfile& u, double r_max, int n) {
    const ProfileRange pr = profile_range(u, r_max, n);
    ordered_json j;
    j["config"] = to_json(c);
    j["config_hash"] = config_hash(c);
    j["kind"] = to_string(u.kind());
    j["note"] = pr.note;
    j["residual"] = finite_or_null(pr.res.sup_rel);
    ordered_json rows = ordered_json::array();
    for (const auto& s : u.tabulate(pr.lo, pr.hi, n))
        rows.push_back({finite_or_null(s.r), finite_or_null(s.u), finite_or_null(s.du)});
    j["rows"] = rows;
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot rename onto " + path);
    }
}

}  // namespace qlb
