#include "qlb/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "qlb/errors.hpp"
#include "qlb/regime.hpp"

namespace qlb {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

bool selected(const SuiteOptions& opt, const std::string& name) {
    return opt.selection.empty() ||
           std::find(opt.selection.begin(), opt.selection.end(), name) != opt.selection.end();
}

// Theorem names for results produced outside a check body.
std::string anchor_for(const std::string& name) {
    static const std::map<std::string, std::string> names = {
        {"energy_identity", "Energy estimates: local energy identity"},
        {"caccioppoli", "Quantitative Caccioppoli estimates"},
        {"caccioppoli_absolute", "Absolute upper bound for the local L^{p-1} norm"},
        {"upper", "Local upper estimates"},
        {"upper_second_form", "Local upper bounds, second form"},
        {"lower", "Local lower estimates"},
        {"lower_pc", "Local lower estimates when 1<p<p_c"},
        {"rev_holder", "Reverse Holder inequalities for supersolutions"},
        {"rev_holder_pc", "Reverse Holder inequalities for 1<p<p_c"},
        {"harnack", "Harnack inequality"},
        {"absolute", "Local absolute bounds"},
        {"gradient", "Local upper bounds for the gradient"},
        {"gradient_absolute", "Local absolute bounds for the gradient when 1<p<p_c"},
        {"moser_trace", "Moser iteration, single step"},
        {"counterexample", "Singular solutions for p_c<p<p_s"}};
    const auto it = names.find(name);
    return it == names.end() ? "fixture construction" : it->second;
}

CheckResult errored(const std::string& name, const Fixture& f, const std::string& why, CheckStatus st) {
    CheckResult r;
    r.name = name;
    r.fixture = f.id;
    r.status = st;
    r.reason = why;
    r.regime = regime_tag(f.spec.params.d, f.spec.params.p);
    r.anchor = anchor_for(name);
    return r;
}

// Runs one check; regime errors become inapplicable, numerical failures inconclusive.
void run_one(std::vector<CheckResult>& out, const Fixture& f, const std::string& name,
             const std::function<std::vector<CheckResult>()>& fn) {
    try {
        for (auto& r : fn()) {
            r.fixture = f.id;
            out.push_back(std::move(r));
        }
    } catch (const RegimeError& e) {
        out.push_back(errored(name, f, e.what(), CheckStatus::Inapplicable));
    } catch (const std::exception& e) {
        out.push_back(errored(name, f, e.what(), CheckStatus::Inconclusive));
    }
}

}  // namespace

std::string fixture_id(const FixtureSpec& s) {
    std::ostringstream os;
    os << (s.singular ? "singular_" : "") << "d" << s.params.d << "_p" << s.params.p << "_lam" << s.params.lambda;
    if (!s.singular) os << "_u0" << s.u0;
    return os.str();
}

std::vector<FixtureSpec> default_grid() {
    std::vector<FixtureSpec> out;
    const std::vector<std::pair<int, double>> super = {{3, 4.0}, {4, 2.5}, {5, 2.0}};
    for (int d : {3, 4, 5}) {
        const CriticalExponents ce = critical_exponents(d);
        std::vector<double> ps = {0.0, 0.5, 1.0};
        if (2.0 < ce.p_c) ps.push_back(2.0);
        for (const auto& [dd, p] : super)
            if (dd == d) ps.push_back(p);
        for (double p : ps)
            for (double lam : {0.5, 1.0, 4.0})
                for (double u0 : {1.0, 5.0}) out.push_back({{d, p, lam}, u0, false});
    }
    for (const auto& [d, p] : super) out.push_back({{d, p, 1.0}, 1.0, true});
    return out;
}

Fixture build_fixture(const FixtureSpec& spec, const SuiteOptions& opt) {
    validate(spec.params);
    Fixture f{fixture_id(spec), spec,
              spec.singular ? singular_profile(spec.params, 1.0) : make_solution(spec.params, spec.u0, opt.shooting),
              {}};
    if (opt.perturbation != 0.0) {
        f.profile = f.profile.scaled(1.0 + opt.perturbation);
        f.id += "_perturbed" + num(opt.perturbation);
    }
    if (opt.chain) {
        f.chain = *opt.chain;
    } else {
        f.chain = scaled(default_chain(f.profile), opt.geometry_scale);
        if (opt.geometry_scale != 1.0) f.id += "_g" + num(opt.geometry_scale);
    }
    return f;
}

std::vector<CheckResult> run_checks(const Fixture& f, const SuiteOptions& opt) {
    std::vector<CheckResult> out;
    const RadialProfile& u = f.profile;
    const RadiiChain& c = f.chain;
    const VerifyOptions& v = opt.verify;
    using V = std::vector<CheckResult>;

    if (selected(opt, "energy_identity"))
        for (double alpha : {-2.0, -0.5, 1.0, 2.0})
            for (double delta : {0.0, 0.1}) {
                if (delta == 0.0 && alpha <= -1.0) continue;
                run_one(out, f, "energy_identity", [&] { return V{check_energy_identity(u, c, alpha, delta, v)}; });
            }
    if (selected(opt, "caccioppoli"))
        for (double delta : {0.0, 0.1})
            run_one(out, f, "caccioppoli", [&] { return V{check_caccioppoli(u, c, delta, v)}; });
    if (selected(opt, "caccioppoli_absolute"))
        run_one(out, f, "caccioppoli_absolute", [&] { return V{check_caccioppoli_absolute(u, c, v)}; });
    if (selected(opt, "upper")) run_one(out, f, "upper", [&] { return V{check_upper(u, c, opt.q, v)}; });
    if (selected(opt, "upper_second_form"))
        for (double q0 : {0.5, 2.0})
            run_one(out, f, "upper_second_form",
                    [&] { return V{check_upper_second_form(u, c, q0, std::nullopt, v)}; });
    if (selected(opt, "lower")) run_one(out, f, "lower", [&] { return V{check_lower(u, c, std::nullopt, v)}; });
    if (selected(opt, "lower_pc"))
        run_one(out, f, "lower_pc", [&] { return V{check_lower_pc(u, c, std::nullopt, v)}; });
    if (selected(opt, "rev_holder"))
        for (double delta : {0.0, 1.0})
            run_one(out, f, "rev_holder", [&] { return V{check_rev_holder(u, c, std::nullopt, delta, v)}; });
    if (selected(opt, "rev_holder_pc")) {
        run_one(out, f, "rev_holder_pc",
                [&] { return V{check_rev_holder_pc(u, c, std::nullopt, std::nullopt, v)}; });
        if (applicability("rev_holder_pc", u.params().d, u.params().p).applicable)
            run_one(out, f, "rev_holder_pc", [&] {
                const ExponentWindow w = harnack_window(u.params(), {});
                return V{check_rev_holder_pc(u, c, std::nullopt, *w.q_under, v)};
            });
    }
    if (selected(opt, "harnack")) run_one(out, f, "harnack", [&] { return V{check_harnack(u, c, {}, v)}; });
    if (selected(opt, "absolute")) run_one(out, f, "absolute", [&] { return V{check_absolute(u, c, v)}; });
    if (selected(opt, "gradient")) run_one(out, f, "gradient", [&] { return V{check_gradient(u, c, v)}; });
    if (selected(opt, "gradient_absolute"))
        run_one(out, f, "gradient_absolute", [&] { return V{check_gradient_absolute(u, c, v)}; });
    if (selected(opt, "moser_trace"))
        run_one(out, f, "moser_trace", [&] { return moser_trace(u, c, opt.q, opt.moser_steps, v); });
    if (selected(opt, "counterexample") && f.spec.singular)
        run_one(out, f, "counterexample", [&] { return V{counterexample_singular(f.spec.params, c, v)}; });
    return out;
}

std::vector<CheckResult> run_suite(const std::vector<FixtureSpec>& specs, const SuiteOptions& opt) {
    std::vector<std::vector<CheckResult>> slots(specs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < specs.size(); i = next++) {
            try {
                const Fixture f = build_fixture(specs[i], opt);
                slots[i] = run_checks(f, opt);
            } catch (const std::exception& e) {
                Fixture stub{fixture_id(specs[i]), specs[i], constant_stub(specs[i].params, 1.0), {}};
                slots[i].push_back(errored("fixture", stub, e.what(), CheckStatus::Inconclusive));
            }
        }
    };
    unsigned n = opt.jobs > 0 ? unsigned(opt.jobs) : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, std::max<size_t>(1, specs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::vector<CheckResult> out;
    for (auto& s : slots)
        for (auto& r : s) out.push_back(std::move(r));
    return out;
}

Summary summarize(const std::vector<CheckResult>& results) {
    Summary s;
    for (const auto& r : results) {
        switch (r.status) {
            case CheckStatus::Pass: ++s.pass; break;
            case CheckStatus::Fail: ++s.fail; break;
            case CheckStatus::Inapplicable: ++s.inapplicable; continue;
            case CheckStatus::Inconclusive: ++s.inconclusive; break;
        }
        // its sides are property counts, not an inequality
        if (r.name == "counterexample") continue;
        const double lm = r.log_margin();
        if (!std::isnan(lm) && (!s.has_worst || lm < s.worst_log_margin)) {
            s.worst_log_margin = lm;
            s.worst_check = r.fixture + ":" + r.name;
            s.has_worst = true;
        }
    }
    return s;
}

}  // namespace qlb
