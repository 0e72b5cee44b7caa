// Command-line front end: constants, solve, verify, q0-scan, sweep.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qlb/errors.hpp"
#include "qlb/regime.hpp"
#include "qlb/report.hpp"
#include "qlb/suite.hpp"

using namespace qlb;
using nlohmann::ordered_json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

struct Flags {
    RunConfig cfg;
    std::string format = "json";
    double r_max = 0.0;
    int rows = 201;
    double d_min = 1.0;
    double d_max = 16.0;
    double step = 0.01;
    std::vector<int> ds;
    std::vector<double> ps;
    std::vector<double> lambdas;
    std::vector<double> u0s;
    std::vector<double> scales;
};

void add_problem(CLI::App* c, Flags& f) {
    c->add_option("--d", f.cfg.problem.d, "dimension (>= 3)");
    c->add_option("--p", f.cfg.problem.p, "exponent p >= 0");
    c->add_option("--lambda", f.cfg.problem.lambda, "coefficient lambda > 0");
}

void add_common(CLI::App* c, Flags& f) {
    c->add_option("--r-inf", f.cfg.r_inf, "inner radius R_inf");
    c->add_option("--r-bar", f.cfg.r_bar, "middle radius R_bar");
    c->add_option("--r0", f.cfg.r0, "outer radius R0");
    c->add_option("--r", f.cfg.r, "enclosing radius R");
    c->add_option("--q", f.cfg.window.q, "exponent of the upper estimate");
    c->add_option("--q-over", f.cfg.window.q_over, "upper exponent of the Harnack window");
    c->add_option("--q-under", f.cfg.window.q_under, "lower exponent of the Harnack window");
    c->add_option("--eps", f.cfg.window.eps, "epsilon of the lower estimates");
    c->add_option("--tol", f.cfg.tol, "shooting tolerance");
    c->add_option("--quad-tol", f.cfg.quad_tol, "relative quadrature tolerance");
    c->add_option("--s2", f.cfg.s2_override, "Sobolev constant override");
    c->add_option("--out", f.cfg.out, "output file (stdout when omitted)");
    c->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--jobs", f.cfg.jobs, "worker threads (0 = hardware)");
}

void add_suite(CLI::App* c, Flags& f) {
    c->add_option("--inject-perturbation", f.cfg.perturbation, "multiply every profile by 1 + value");
    c->add_option("--select", f.cfg.selection, "check names to run (default: all)")->delimiter(',');
    c->add_option("--moser-steps", f.cfg.moser_steps, "steps of the traced Moser iteration");
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty())
        std::cout << text;
    else
        write_atomic(c.out, text);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

int finish_suite(const RunConfig& c, const std::vector<CheckResult>& results) {
    if (c.format == OutputFormat::Csv) emit(c, results_csv(c, results));
    else emit(c, dump(c.sweep ? sweep_report(c, results) : verify_report(c, results)));
    const Summary s = summarize(results);
    std::cerr << "pass=" << s.pass << " fail=" << s.fail << " inapplicable=" << s.inapplicable
              << " inconclusive=" << s.inconclusive << "\n";
    return s.fail > 0 ? kExitFail : 0;
}

int cmd_constants(Flags& f) {
    RunConfig& c = f.cfg;
    const ordered_json j = constants_report(c);
    if (c.format == OutputFormat::Json) {
        emit(c, dump(j));
        return 0;
    }
    std::string csv = "# config_hash=" + j["config_hash"].get<std::string>() + "\nname,applicable,log10_value,reason\n";
    for (const auto& e : j["constants"])
        csv += e["name"].get<std::string>() + "," + (e["applicable"].get<bool>() ? "true" : "false") + "," +
               (e["log10_value"].is_null() ? "" : e["log10_value"].dump()) + "," + e["reason"].get<std::string>() +
               "\n";
    emit(c, csv);
    return 0;
}

int cmd_solve(Flags& f) {
    RunConfig& c = f.cfg;
    if (!c.u0 && !c.singular) throw DomainError("solve needs --u0 (or --singular)");
    const RadialProfile u = c.singular ? singular_profile(c.problem, f.r_max > 0.0 ? f.r_max : 1.0)
                                       : make_solution(c.problem, *c.u0, ShootingOptions{0.0, c.tol, 2000000});
    std::string note;
    const std::string csv = profile_csv(u, f.r_max, f.rows, config_hash(c), &note);
    if (!note.empty()) std::cerr << note << "\n";
    if (c.format == OutputFormat::Csv) {
        emit(c, csv);
        return 0;
    }
    emit(c, dump(profile_report(c, u, f.r_max, f.rows)));
    return 0;
}

int cmd_verify(Flags& f, bool fixture_given) {
    RunConfig& c = f.cfg;
    std::vector<FixtureSpec> specs;
    if (fixture_given || c.singular)
        specs.push_back({c.problem, c.u0.value_or(1.0), c.singular});
    else
        specs = default_grid();
    return finish_suite(c, run_suite(specs, suite_options(c)));
}

int cmd_q0_scan(Flags& f) {
    RunConfig& c = f.cfg;
    const Q0Scan s = q0_scan(c.window.eps, f.d_min, f.d_max, f.step);
    std::cerr << "argmin_d=" << s.argmin_d << " min_q0=" << s.min_q0 << "\n";
    if (c.format == OutputFormat::Csv) {
        emit(c, q0_scan_csv(s, c.window.eps, config_hash(c)));
        return 0;
    }
    ordered_json j;
    j["config"] = to_json(c);
    j["config_hash"] = config_hash(c);
    j["scan"] = {{"eps", c.window.eps}, {"d_min", f.d_min}, {"d_max", f.d_max}, {"step", f.step}};
    j["argmin_d"] = s.argmin_d;
    j["min_q0"] = s.min_q0;
    ordered_json rows = ordered_json::array();
    for (const auto& [d, q] : s.rows) rows.push_back({d, q});
    j["rows"] = rows;
    emit(c, dump(j));
    return 0;
}

int cmd_sweep(Flags& f) {
    RunConfig& c = f.cfg;
    std::vector<FixtureSpec> specs;
    SweepGrid grid{f.ds.empty() && f.ps.empty() && f.lambdas.empty() && f.u0s.empty(), f.ds, f.ps, f.lambdas,
                   f.u0s, f.scales.empty() ? std::vector<double>{1.0} : f.scales};
    c.sweep = grid;
    if (grid.default_grid) {
        specs = default_grid();
    } else {
        const std::vector<int> ds = f.ds.empty() ? std::vector<int>{c.problem.d} : f.ds;
        const std::vector<double> ps = f.ps.empty() ? std::vector<double>{c.problem.p} : f.ps;
        const std::vector<double> ls = f.lambdas.empty() ? std::vector<double>{c.problem.lambda} : f.lambdas;
        const std::vector<double> us = f.u0s.empty() ? std::vector<double>{c.u0.value_or(1.0)} : f.u0s;
        for (int d : ds)
            for (double p : ps)
                for (double l : ls)
                    for (double u0 : us) {
                        const FixtureSpec s{{d, p, l}, u0, false};
                        validate(s.params);
                        specs.push_back(s);
                    }
    }
    const std::vector<double> scales = f.scales.empty() ? std::vector<double>{1.0} : f.scales;
    for (double s : scales)
        if (!(s > 0.0 && s * 0.875 < 1.0)) throw GeometryError("geometry scale must lie in (0, 8/7)");
    std::vector<CheckResult> all;
    for (double s : scales) {
        SuiteOptions o = suite_options(c);
        o.geometry_scale = s;
        for (auto& r : run_suite(specs, o)) all.push_back(std::move(r));
    }
    return finish_suite(c, all);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit local estimates for -Δu = λu^p: constants, profiles and verification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI config file; flags override it");
    Flags f;

    auto* constants = app.add_subcommand("constants", "explicit constants for one (d, p, lambda) and geometry");
    add_problem(constants, f);
    add_common(constants, f);

    auto* solve = app.add_subcommand("solve", "radial profile as (r, u, du_dr) rows");
    add_problem(solve, f);
    add_common(solve, f);
    solve->add_option("--u0", f.cfg.u0, "central value u(0)");
    solve->add_option("--r-max", f.r_max, "last radius (default: domain end)");
    solve->add_option("--rows", f.rows, "number of rows")->check(CLI::Range(2, 10000000));
    solve->add_flag("--singular", f.cfg.singular, "singular profile A r^{-2/(p-1)}");

    auto* verify = app.add_subcommand("verify", "run the checks on one fixture or the default grid");
    add_problem(verify, f);
    add_common(verify, f);
    add_suite(verify, f);
    verify->add_option("--u0", f.cfg.u0, "central value u(0)");
    verify->add_flag("--singular", f.cfg.singular, "use the singular profile");

    auto* scan = app.add_subcommand("q0-scan", "q0(d, eps) over continuous d");
    add_common(scan, f);
    scan->add_option("--d-min", f.d_min, "first d");
    scan->add_option("--d-max", f.d_max, "last d");
    scan->add_option("--step", f.step, "scan step");

    auto* sweep = app.add_subcommand("sweep", "Cartesian grid over d, p, lambda, u0 and geometry scale");
    add_problem(sweep, f);
    add_common(sweep, f);
    add_suite(sweep, f);
    sweep->add_option("--u0", f.cfg.u0, "central value when --u0s is absent");
    sweep->add_option("--ds", f.ds, "dimensions")->delimiter(',');
    sweep->add_option("--ps", f.ps, "exponents")->delimiter(',');
    sweep->add_option("--lambdas", f.lambdas, "coefficients")->delimiter(',');
    sweep->add_option("--u0s", f.u0s, "central values")->delimiter(',');
    sweep->add_option("--scales", f.scales, "geometry scales in (0, 8/7)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInvalid;
    }

    try {
        RunConfig& c = f.cfg;
        c.format = parse_format(f.format);
        CLI::App* sub = app.get_subcommands().front();
        c.command = sub->get_name();
        bool fixture_given = false;
        for (const char* name : {"--d", "--p", "--lambda", "--u0"})
            if (const CLI::Option* o = sub->get_option_no_throw(name)) fixture_given = fixture_given || o->count() > 0;
        if (c.command == "q0-scan") {
            if (!(c.window.eps > 0.0)) throw DomainError("eps must be positive");
            return cmd_q0_scan(f);
        }
        validate(c);
        if (c.command == "constants") return cmd_constants(f);
        if (c.command == "solve") return cmd_solve(f);
        if (c.command == "verify") return cmd_verify(f, fixture_given);
        return cmd_sweep(f);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
