#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qlb/constants.hpp"
#include "qlb/radial.hpp"
#include "qlb/suite.hpp"

namespace qlb {

enum class OutputFormat { Json, Csv };
std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

// Grid axes of a sweep; an empty axis falls back to the single problem value.
struct SweepGrid {
    bool default_grid = false;
    std::vector<int> ds;
    std::vector<double> ps;
    std::vector<double> lambdas;
    std::vector<double> u0s;
    std::vector<double> scales;
};

// Everything needed to reproduce a run; echoed into every report.
struct RunConfig {
    std::string command;
    ProblemParams problem;
    std::optional<double> u0;
    std::optional<double> r_inf;
    std::optional<double> r_bar;
    std::optional<double> r0;
    std::optional<double> r;
    ExponentWindow window;
    double tol = 1e-10;       // shooting tolerance
    double quad_tol = 1e-11;  // relative quadrature tolerance
    std::optional<double> s2_override;
    OutputFormat format = OutputFormat::Json;
    std::string out;  // empty writes to stdout
    int jobs = 0;
    double perturbation = 0.0;
    bool singular = false;
    std::vector<std::string> selection;
    int moser_steps = 6;
    std::optional<SweepGrid> sweep;
};

nlohmann::ordered_json to_json(const RunConfig& c);

// 64-bit FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const RunConfig& c);
std::uint64_t fnv1a64(const std::string& bytes);

// Chain from the explicit radii; missing ones fall back to the default fractions of `scale`.
RadiiChain chain_from_config(const RunConfig& c, double scale);

// Suite options derived from the config.
SuiteOptions suite_options(const RunConfig& c);

// Validates parameters, radii and options; throws qlb::Error on the first problem.
void validate(const RunConfig& c);

// Non-finite numbers serialize as null.
nlohmann::ordered_json finite_or_null(double x);

nlohmann::ordered_json to_json(const CheckResult& r);
nlohmann::ordered_json to_json(const Summary& s);

// {config, config_hash, results, summary}.
nlohmann::ordered_json verify_report(const RunConfig& c, const std::vector<CheckResult>& results);
// Counts and worst margin per check name, keys sorted.
nlohmann::ordered_json per_check_summary(const std::vector<CheckResult>& results);
// verify_report plus the per-check table.
nlohmann::ordered_json sweep_report(const RunConfig& c, const std::vector<CheckResult>& results);
std::string results_csv(const RunConfig& c, const std::vector<CheckResult>& results);

// One entry per constant; inapplicable ones carry the table reason.
nlohmann::ordered_json constants_report(const RunConfig& c);

struct Q0Scan {
    std::vector<std::pair<double, double>> rows;  // (d, q0(d, eps))
    double argmin_d = 0.0;
    double min_q0 = 0.0;
};

// Continuous-d scan of q0(d, eps) on [d_lo, d_hi].
Q0Scan q0_scan(double eps, double d_lo, double d_hi, double step);
std::string q0_scan_csv(const Q0Scan& s, double eps, const std::string& hash);

// (r, u, du_dr) rows; the header comment carries the hash and the residual certificate.
std::string profile_csv(const RadialProfile& u, double r_max, int n, const std::string& hash, std::string* note);

// Same rows as JSON: {config, config_hash, kind, note, residual, rows}.
nlohmann::ordered_json profile_report(const RunConfig& c, const RadialProfile& u, double r_max, int n);

// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace qlb
