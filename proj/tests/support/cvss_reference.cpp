#include "cvss_reference.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vulnprio::testing {

double reference_roundup(double input) {
    const long int_input = std::lround(input * 100000);
    if (int_input % 10000 == 0) return int_input / 100000.0;
    return (std::floor(int_input / 10000) + 1) / 10.0;
}

double reference_base_score(const std::string& vector) {
    std::map<std::string, std::string> m;
    std::stringstream ss(vector);
    std::string part;
    while (std::getline(ss, part, '/')) {
        auto colon = part.find(':');
        if (part.rfind("CVSS", 0) == 0) continue;
        m[part.substr(0, colon)] = part.substr(colon + 1);
    }

    const std::map<std::string, double> av = {{"N", 0.85}, {"A", 0.62}, {"L", 0.55}, {"P", 0.2}};
    const std::map<std::string, double> ac = {{"L", 0.77}, {"H", 0.44}};
    const std::map<std::string, double> pr_unchanged = {{"N", 0.85}, {"L", 0.62}, {"H", 0.27}};
    const std::map<std::string, double> pr_changed = {{"N", 0.85}, {"L", 0.68}, {"H", 0.5}};
    const std::map<std::string, double> ui = {{"N", 0.85}, {"R", 0.62}};
    const std::map<std::string, double> cia = {{"H", 0.56}, {"L", 0.22}, {"N", 0}};

    const bool scope_changed = m.at("S") == "C";
    const double iss = 1 - ((1 - cia.at(m.at("C"))) * (1 - cia.at(m.at("I"))) * (1 - cia.at(m.at("A"))));
    double impact;
    if (!scope_changed) {
        impact = 6.42 * iss;
    } else {
        impact = 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15);
    }
    const double pr = scope_changed ? pr_changed.at(m.at("PR")) : pr_unchanged.at(m.at("PR"));
    const double exploitability = 8.22 * av.at(m.at("AV")) * ac.at(m.at("AC")) * pr * ui.at(m.at("UI"));

    if (impact <= 0) return 0;
    if (!scope_changed) return reference_roundup(std::min(impact + exploitability, 10.0));
    return reference_roundup(std::min(1.08 * (impact + exploitability), 10.0));
}

}  // namespace vulnprio::testing
