#include "bolab/config.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bolab/io.hpp"

namespace bolab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a finite number: '" + s + "'");
    return v;
}

std::uint64_t to_unsigned(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("not a non-negative integer: '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("integer out of range: '" + s + "'");
    }
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

// Each line "key = value"; returns (key, value, line) triples in file order.
struct Entry {
    std::string key, value;
    std::size_t line;
};

std::vector<Entry> key_values(const std::string& text, const std::string& source) {
    std::vector<Entry> out;
    std::set<std::string> seen;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw IoError(source, lineno, "expected 'key = value'");
        Entry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno};
        if (e.key.empty()) throw IoError(source, lineno, "missing key before '='");
        if (!seen.insert(e.key).second) throw IoError(source, lineno, "repeated key '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

Tolerances Tolerances::defaults() {
    Tolerances t;
    t.values_ = {
        {"l1_eigenvalue_abs", 2e-3},     {"l1_kernel_correlation", 0.999}, {"closed_form_rel", 1e-3},
        {"trace_identity_rel", 1e-3},    {"el_residual", 1e-5},            {"multiplier_rel", 1e-5},
        {"hessian_d_abs", 1e-10},        {"scaling_spread", 0.05},         {"golden_ratio_abs", 1e-3},
        {"transport_rel", 1e-4},         {"collision_rel", 1e-3},          {"drift_rel", 1e-8},
        {"phase_shift_abs", 1e-3},       {"stability_factor", 10.0},       {"control_distance", 1e-4},
        {"tau_scattering_inf", 1e-10},   {"gradient_fd_rel", 1e-6},        {"positivity_floor", 0.0},
    };
    return t;
}

double Tolerances::get(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw std::out_of_range("unknown tolerance '" + name + "'");
    return it->second;
}

void Tolerances::set(const std::string& name, double value) {
    auto it = values_.find(name);
    if (it == values_.end()) throw std::out_of_range("unknown tolerance '" + name + "'");
    if (!std::isfinite(value) || value < 0.0) throw std::invalid_argument("tolerance must be finite and non-negative");
    it->second = value;
}

nlohmann::json Tolerances::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

void apply_tolerance_overrides(Tolerances& tol, const std::string& text, const std::string& source) {
    for (const auto& e : key_values(text, source)) {
        try {
            tol.set(e.key, to_real(e.value));
        } catch (const std::exception& ex) {
            throw IoError(source, e.line, ex.what());
        }
    }
}

std::pair<double, std::size_t> parse_grid_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("grid must look like L:n, got '" + text + "'");
    const double L = to_real(trim(text.substr(0, colon)));
    const auto n = to_unsigned(trim(text.substr(colon + 1)));
    return {L, static_cast<std::size_t>(n)};
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig c;
    for (const auto& e : key_values(text, source)) {
        try {
            if (e.key == "subcommand") {
                c.subcommand = e.value;
            } else if (e.key == "grid") {
                const auto [L, n] = parse_grid_spec(e.value);
                c.half_length = L;
                c.points = n;
            } else if (e.key == "speeds") {
                c.speeds = parse_real_list(e.value);
            } else if (e.key == "phases") {
                c.phases = parse_real_list(e.value);
            } else if (e.key == "t") {
                c.time = to_real(e.value);
            } else if (e.key == "dt") {
                c.dt = to_real(e.value);
            } else if (e.key == "T") {
                c.final_time = to_real(e.value);
            } else if (e.key == "delta") {
                c.delta = to_real(e.value);
            } else if (e.key == "seed") {
                c.seed = to_unsigned(e.value);
            } else if (e.key == "out") {
                c.out = e.value;
            } else if (e.key == "preset") {
                c.preset = e.value;
            } else if (e.key == "tol-overrides") {
                c.tol_overrides = e.value;
            } else if (e.key == "serial") {
                c.serial = to_bool(e.value);
            } else {
                throw std::invalid_argument("unknown key '" + e.key + "'");
            }
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& ex) {
            throw IoError(source, e.line, ex.what());
        }
    }
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["grid"] = half_length && points ? nlohmann::json{{"L", *half_length}, {"n", *points}} : nlohmann::json(nullptr);
    j["speeds"] = speeds;
    j["phases"] = phases;
    j["t"] = time;
    j["dt"] = dt ? nlohmann::json(*dt) : nlohmann::json(nullptr);
    j["T"] = final_time ? nlohmann::json(*final_time) : nlohmann::json(nullptr);
    j["delta"] = delta ? nlohmann::json(*delta) : nlohmann::json(nullptr);
    j["seed"] = seed;
    j["preset"] = preset;
    // The output directory and execution mode do not change results.
    return j;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

}  // namespace bolab
