#pragma once

#include <string>
#include <vector>

namespace qlb {

// One cell of the results table: does a theorem cover (d, p)?
struct Applicability {
    std::string check;
    bool applicable = false;
    std::string reason;  // table entry when applicable, "No" or the violated range otherwise
};

// Names of every check the suite knows, in report order.
const std::vector<std::string>& check_names();

// Table lookup; unknown names throw DomainError.
Applicability applicability(const std::string& check, int d, double p);

std::vector<Applicability> regime_table(int d, double p);

// Short tag for the p-window: "0<=p<1", "p=1", "1<p<p_c", "p=p_c", "p_c<p<p_s", "p>=p_s".
std::string regime_tag(int d, double p);

}  // namespace qlb
