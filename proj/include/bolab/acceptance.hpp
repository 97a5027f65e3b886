#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bolab/config.hpp"
#include "bolab/parallel.hpp"

namespace bolab {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    std::string summary;    // one line, printed next to PASS/FAIL
    nlohmann::json details;  // measured values, grids and thresholds
};

struct AcceptanceOptions {
    Tolerances tol = Tolerances::defaults();
    Exec exec = Exec::parallel;
    std::uint64_t seed = 12345;
};

constexpr int kCriterionCount = 10;

// Runs one acceptance criterion (1..10). Exceptions inside a criterion are
// reported as FAIL with the message, never propagated.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, const std::vector<int>& ids = {});

// "CRITERION 3 PASS  trace identities: ..." style line.
std::string format_line(const CriterionResult& r);

// Report document: per-criterion records plus the tolerances used. Timings are
// left out so that equal inputs give byte-identical reports.
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt);

}  // namespace bolab
