#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bolab {

// Named tolerances used by the checks. Defaults mirror the acceptance
// thresholds; an override file may change values but not introduce names.
class Tolerances {
public:
    static Tolerances defaults();
    double get(const std::string& name) const;
    void set(const std::string& name, double value);  // name must exist
    const std::map<std::string, double>& all() const { return values_; }
    nlohmann::json to_json() const;

private:
    std::map<std::string, double> values_;
};

// "name = value" lines, '#' comments. Errors carry the line number.
void apply_tolerance_overrides(Tolerances& tol, const std::string& text, const std::string& source = "<string>");

struct ExperimentConfig {
    std::string subcommand;
    std::optional<double> half_length;
    std::optional<std::size_t> points;
    std::vector<double> speeds;
    std::vector<double> phases;
    double time = 0.0;
    std::optional<double> dt;
    std::optional<double> final_time;
    std::optional<double> delta;
    std::uint64_t seed = 12345;
    std::string out = "bolab-out";
    std::string preset;
    std::string tol_overrides;  // path, resolved by the caller
    bool serial = false;

    // Canonical form used for the report hash; keys sorted.
    nlohmann::json to_json() const;
    std::string hash() const;
};

// Config files mirror the command-line flags, one "key = value" per line:
//   subcommand = evolve
//   grid = 512:16384
//   speeds = 1,2
// Keys: subcommand, grid, speeds, phases, t, dt, T, delta, seed, out, preset,
// tol-overrides, serial. Unknown or repeated keys are rejected with the line.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

// "L:n"
std::pair<double, std::size_t> parse_grid_spec(const std::string& text);

}  // namespace bolab
