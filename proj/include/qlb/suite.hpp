#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlb/verify.hpp"

namespace qlb {

struct FixtureSpec {
    ProblemParams params;
    double u0 = 1.0;
    bool singular = false;
};

struct Fixture {
    std::string id;
    FixtureSpec spec;
    RadialProfile profile;
    RadiiChain chain;
};

std::string fixture_id(const FixtureSpec& s);

// d ∈ {3,4,5}; p ∈ {0, 1/2, 1, 2 when below p_c, one value in (p_c,p_s)}; λ ∈ {1/2,1,4}; u0 ∈ {1,5};
// plus one singular profile per supercritical (d,p) at λ = 1.
std::vector<FixtureSpec> default_grid();

struct SuiteOptions {
    VerifyOptions verify;
    std::vector<std::string> selection;  // empty runs every check
    int jobs = 0;                        // 0 uses the hardware concurrency
    int moser_steps = 6;
    std::optional<double> q;             // exponent for the upper estimate and the Moser trace
    double perturbation = 0.0;           // profile multiplied by 1 + perturbation
    std::optional<RadiiChain> chain;     // overrides the default geometry
    double geometry_scale = 1.0;         // multiplies the default geometry; R must stay below r⁺
    ShootingOptions shooting;
};

Fixture build_fixture(const FixtureSpec& spec, const SuiteOptions& opt = {});

std::vector<CheckResult> run_checks(const Fixture& f, const SuiteOptions& opt = {});

// Builds and checks every fixture on a bounded worker pool; output order follows the input order.
std::vector<CheckResult> run_suite(const std::vector<FixtureSpec>& specs, const SuiteOptions& opt = {});

struct Summary {
    int pass = 0;
    int fail = 0;
    int inapplicable = 0;
    int inconclusive = 0;
    double worst_log_margin = 0.0;  // over margin-decided results; the counterexample is excluded
    std::string worst_check;
    bool has_worst = false;
};

Summary summarize(const std::vector<CheckResult>& results);

}  // namespace qlb
