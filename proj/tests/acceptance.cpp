// Acceptance battery: one PASS/FAIL line per criterion, with measured values.
//   acceptance            run criteria 1..10
//   acceptance c4 c7      run a selection
// Companion INFO lines (re-derived constants, corrected corridor) are printed
// next to the criterion they explain and never affect the exit status.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "filcol/battery.hpp"

namespace {

const std::map<std::string, std::vector<std::string>> kCompanions{
    {"c2", {"c2.derived"}}, {"c5", {"c5.printed_m3"}}, {"c7", {"c7.corrected"}}};

void print(const filcol::CheckResult& r) {
    const char* tag = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
    const std::string name = r.informational ? r.id : "criterion " + r.id.substr(1);
    std::printf("%s  %-16s %s  (%.3f s)\n", tag, name.c_str(), r.title.c_str(), r.seconds);
    for (const auto& [k, v] : r.measured) std::printf("        %-28s %.15g\n", k.c_str(), v);
    if (!r.note.empty()) std::printf("        note: %s\n", r.note.c_str());
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> wanted(argv + 1, argv + argc);
    if (wanted.empty())
        for (int i = 1; i <= 10; ++i) wanted.push_back("c" + std::to_string(i));

    std::vector<std::string> ids;
    for (const auto& w : wanted) {
        ids.push_back(w);
        if (auto it = kCompanions.find(w); it != kCompanions.end())
            ids.insert(ids.end(), it->second.begin(), it->second.end());
    }

    int failed = 0;
    try {
        for (const auto& r : filcol::run_battery(ids)) {
            print(r);
            if (!r.informational && !r.passed) ++failed;
        }
    } catch (const std::exception& e) {
        std::printf("FAIL  error: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
