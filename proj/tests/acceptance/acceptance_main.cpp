// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number ("acceptance 1 4 6").
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "bolab/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > bolab::kCriterionCount) {
            std::fprintf(stderr, "usage: %s [criterion numbers 1..%d]\n", argv[0], bolab::kCriterionCount);
            return 2;
        }
        ids.push_back(id);
    }
    if (ids.empty())
        for (int k = 1; k <= bolab::kCriterionCount; ++k) ids.push_back(k);

    // BOLAB_ACCEPTANCE_DETAILS=1 dumps each criterion's measurements to stderr.
    const char* env = std::getenv("BOLAB_ACCEPTANCE_DETAILS");
    const bool verbose = env != nullptr && std::string(env) == "1";
    bolab::AcceptanceOptions opt;
    int failed = 0;
    for (int id : ids) {
        const auto r = bolab::run_criterion(id, opt);
        std::printf("%s\n", bolab::format_line(r).c_str());
        std::fflush(stdout);
        if (verbose) std::fprintf(stderr, "%s\n", r.details.dump(1).c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
    return failed == 0 ? 0 : 1;
}
