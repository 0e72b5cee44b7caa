#include "qlb/regime.hpp"

#include <algorithm>

#include "qlb/core_params.hpp"
#include "qlb/errors.hpp"

namespace qlb {

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = {
        "energy_identity", "caccioppoli", "caccioppoli_absolute", "upper",       "upper_second_form",
        "lower",           "lower_pc",    "rev_holder",           "rev_holder_pc", "harnack",
        "absolute",        "gradient",    "gradient_absolute",    "moser_trace", "counterexample"};
    return names;
}

std::string regime_tag(int d, double p) {
    const CriticalExponents ce = critical_exponents(d);
    if (p >= ce.p_s) return "p>=p_s";
    if (p < 1.0) return "0<=p<1";
    if (p == 1.0) return "p=1";
    if (p < ce.p_c) return "1<p<p_c";
    if (p == ce.p_c) return "p=p_c";
    return "p_c<p<p_s";
}

Applicability applicability(const std::string& check, int d, double p) {
    const auto& names = check_names();
    if (std::find(names.begin(), names.end(), check) == names.end())
        throw DomainError("unknown check '" + check + "'");
    if (d < 3) throw RegimeError("dimension must be at least 3");
    if (p < 0.0) throw DomainError("p must be nonnegative");
    const CriticalExponents ce = critical_exponents(d);
    const std::string tag = regime_tag(d, p);
    Applicability a{check, true, tag};

    // Energy identity and Caccioppoli estimates hold for every p >= 0.
    if (check == "energy_identity" || check == "caccioppoli") return a;
    if (check == "caccioppoli_absolute") {
        if (p <= 1.0) return {check, false, "absolute L^{p-1} form needs p>1"};
        return a;
    }
    if (p >= ce.p_s) return {check, false, "p>=p_s: outside every row of the table"};

    if (check == "lower_pc" || check == "rev_holder_pc" || check == "gradient_absolute") {
        if (p > 1.0 && p < ce.p_c) return a;
        return {check, false, "needs 1<p<p_c"};
    }
    if (check == "absolute") {
        if (p < 1.0) return {check, true, "lower"};
        if (p > 1.0 && p < ce.p_c) return {check, true, "upper"};
        return {check, false, "No"};
    }
    if (check == "counterexample") {
        if (p > ce.p_c) return a;
        return {check, false, "needs p_c<p<p_s"};
    }
    if (check == "harnack") {
        if (p >= ce.p_c) return {check, true, "H_p[u]"};
        return {check, true, "H_p"};
    }
    // upper, upper_second_form, lower, rev_holder, gradient, moser_trace: every row below p_s
    return a;
}

std::vector<Applicability> regime_table(int d, double p) {
    std::vector<Applicability> out;
    for (const auto& name : check_names()) out.push_back(applicability(name, d, p));
    return out;
}

}  // namespace qlb
