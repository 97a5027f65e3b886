#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bolab/acceptance.hpp"
#include "bolab/config.hpp"
#include "bolab/evolution.hpp"
#include "bolab/functionals.hpp"
#include "bolab/io.hpp"
#include "bolab/operators.hpp"
#include "bolab/solitons.hpp"
#include "bolab/spectral.hpp"
#include "bolab/variational.hpp"

namespace bolab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

// Raised for anything the user can fix by changing flags or files.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Context {
    ExperimentConfig cfg;
    Tolerances tol = Tolerances::defaults();
    Exec exec = Exec::parallel;

    fs::path out(const std::string& name) const { return fs::path(cfg.out) / name; }

    Grid grid_or(double L, std::size_t n) const {
        if (cfg.half_length && cfg.points) return Grid::make(*cfg.half_length, *cfg.points);
        return Grid::make(L, n);
    }

    SolitonParams params(const std::vector<double>& default_speeds) const {
        std::vector<double> c = cfg.speeds.empty() ? default_speeds : cfg.speeds;
        std::vector<double> x = cfg.phases.empty() ? std::vector<double>(c.size(), 0.0) : cfg.phases;
        return SolitonParams::make(c, x, cfg.time);
    }
};

json grid_json(const Grid& g) { return {{"L", g.half_length()}, {"n", g.size()}}; }

// Collects named checks and the measured results for one subcommand.
class Report {
public:
    json results = json::object();
    json files = json::array();

    void check(const std::string& name, double value, double limit, bool ok) {
        checks_.push_back({{"name", name}, {"value", value}, {"limit", limit}, {"pass", ok}});
        pass_ = pass_ && ok;
    }
    void check_count(const std::string& name, long value, long expected) {
        checks_.push_back({{"name", name}, {"value", value}, {"expected", expected}, {"pass", value == expected}});
        pass_ = pass_ && value == expected;
    }
    void check_flag(const std::string& name, bool ok, const std::string& note) {
        checks_.push_back({{"name", name}, {"note", note}, {"pass", ok}});
        pass_ = pass_ && ok;
    }
    void file(const fs::path& p) { files.push_back(p.filename().string()); }

    bool pass() const { return pass_; }
    const json& checks() const { return checks_; }

private:
    json checks_ = json::array();
    bool pass_ = true;
};

double relative_l2(const RealField& a, const RealField& ref) { return l2_norm(a - ref) / l2_norm(ref); }

// Spacing fine enough for the fastest soliton, domain long enough for the slowest.
Grid soliton_grid(const std::vector<double>& c) {
    const double cmin = *std::min_element(c.begin(), c.end());
    const double cmax = *std::max_element(c.begin(), c.end());
    const double L = 256.0 * std::max(1.0, 1.0 / cmin);
    const double h = std::min(0.125, 0.1875 / cmax);
    std::size_t n = 8;
    while (2.0 * L / static_cast<double>(n) > h) n *= 2;
    return Grid::make(L, n);
}

void write_field_pair(const Context& ctx, Report& rep, const std::string& stem, const RealField& u) {
    const fs::path bin = ctx.out(stem + ".bin"), txt = ctx.out(stem + ".txt");
    write_field_binary(bin, u);
    write_field_text(txt, u);
    rep.file(bin);
    rep.file(txt);
}

void cmd_construct(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0});
    const Grid g = ctx.grid_or(256.0, 4096);
    const RealField u = nsoliton_tau(p, g, TauSign::positive, ctx.exec);
    const ScatteringFields s = nsoliton_scattering(p, g, ctx.exec);
    const double umin = *std::min_element(u.begin(), u.end());
    const double gap = max_abs(u - s.u);
    rep.results = {{"grid", grid_json(g)},
                   {"min", umin},
                   {"max", max_abs(u)},
                   {"integral", integrate(u)},
                   {"tau_vs_scattering_inf", gap},
                   {"max_condition", s.max_condition},
                   {"refined_points", s.refined_points}};
    rep.check("positivity", umin, ctx.tol.get("positivity_floor"), umin > ctx.tol.get("positivity_floor"));
    rep.check("tau_vs_scattering_inf", gap, ctx.tol.get("tau_scattering_inf"), gap <= ctx.tol.get("tau_scattering_inf"));
    write_field_pair(ctx, rep, "construct_field", u);
}

void cmd_functionals(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0});
    const Grid g = ctx.cfg.half_length ? ctx.grid_or(0, 0) : soliton_grid(p.speeds);
    const RealField u = nsoliton_tau(p, g, TauSign::positive, ctx.exec);
    const int max_order = 5;
    const ConservedTower tower = conserved_tower(u, max_order);
    json rows = json::array();
    double worst = 0.0;
    for (int n = 1; n <= max_order; ++n) {
        const double want = trace_identity(p, n);
        const double got = tower.values[static_cast<std::size_t>(n)];
        const double rel = std::abs(got - want) / std::abs(want);
        worst = std::max(worst, rel);
        json row = {{"n", n}, {"tower", got}, {"trace_identity", want}, {"rel_error", rel},
                    {"imag_residue", tower.imag_residue[static_cast<std::size_t>(n)]}};
        if (n <= 4) row["explicit"] = explicit_H(u, n);
        rows.push_back(row);
    }
    rep.results = {{"grid", grid_json(g)}, {"rows", rows}, {"residue_flagged", tower.flagged}};
    rep.check("trace_identity_rel", worst, ctx.tol.get("trace_identity_rel"), worst <= ctx.tol.get("trace_identity_rel"));
    const fs::path csv = ctx.out("functionals_tower.csv");
    write_tower_csv(csv, tower);
    rep.file(csv);
}

void cmd_variational(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0, 2.0});
    const Grid g = ctx.grid_or(256.0, 4096);
    // The least-squares fit sees the 1/L^2 truncation of the periodized profile,
    // so by default it runs on a longer domain at the same spacing.
    const Grid og = ctx.grid_or(2048.0, 65536);
    const double el = el_residual(p, g);
    const Multipliers vieta = vieta_multipliers(p.speeds);
    const Multipliers fit = multiplier_oracle(p, og);
    double err = 0.0;
    for (std::size_t k = 0; k < vieta.mu.size(); ++k)
        err = std::max(err, std::abs(fit.mu[k] - vieta.mu[k]) / std::abs(vieta.mu[k]));
    rep.results = {{"el_grid", grid_json(g)}, {"oracle_grid", grid_json(og)}, {"el_residual", el},
                   {"vieta", vieta.mu},       {"oracle", fit.mu},             {"oracle_rel_error", err}};
    rep.check("el_residual", el, ctx.tol.get("el_residual"), el <= ctx.tol.get("el_residual"));
    rep.check("multiplier_rel", err, ctx.tol.get("multiplier_rel"), err <= ctx.tol.get("multiplier_rel"));
    if (p.count() >= 2) {
        const HessianD d = hessian_D(p.speeds);
        rep.results["D_eigenvalues"] = std::vector<double>(d.eigenvalues.data(), d.eigenvalues.data() + d.eigenvalues.size());
        rep.results["p_of_D"] = d.positive;
        // B^T A is diagonal; its entries carry a factor pi, so both forms are kept.
        std::vector<double> diag, diag_over_pi;
        for (Eigen::Index k = 0; k < d.BtA.rows(); ++k) {
            diag.push_back(d.BtA(k, k));
            diag_over_pi.push_back(d.BtA(k, k) / std::numbers::pi);
        }
        rep.results["BtA_diagonal"] = diag;
        rep.results["BtA_diagonal_over_pi"] = diag_over_pi;
        rep.results["D_asymmetry"] = d.asymmetry;
        rep.check_count("p_of_D", d.positive, (static_cast<long>(p.count()) + 1) / 2);
    }
}

void cmd_spectrum(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0});
    const Grid g = ctx.grid_or(128.0, 2048);
    const fs::path csv = ctx.out("spectrum.csv");
    if (p.count() == 1) {
        // L_1 at speed c is c times a unitary copy of L_1 at speed 1.
        const double c = p.speeds.front();
        const EigenPairs e = lowest_eigenpairs(assemble_L1(c, g, ctx.exec), 6);
        const double err_neg = std::abs(e.values[0] + c * kGolden);
        const double err_pos = std::abs(e.values[2] - c * (kGolden - 1.0));
        const auto col = e.vectors.col(1);
        const RealField kernel(g, std::vector<double>(col.data(), col.data() + col.size()));
        const double corr = correlation(kernel, soliton_kernel(c, g).front());
        rep.results = {{"operator", "L_1"}, {"grid", grid_json(g)}, {"lowest", e.values}, {"kernel_correlation", corr}};
        const double tol = ctx.tol.get("l1_eigenvalue_abs");
        rep.check("negative_eigenvalue", err_neg, tol, err_neg <= tol);
        rep.check("positive_eigenvalue", err_pos, tol, err_pos <= tol);
        rep.check("kernel_correlation", corr, ctx.tol.get("l1_kernel_correlation"),
                  corr >= ctx.tol.get("l1_kernel_correlation"));
        write_spectrum_csv(csv, e.values);
        write_field_pair(ctx, rep, "spectrum_kernel", kernel);
    } else {
        const EigenPairs e = lowest_eigenpairs(assemble_LN(p, g, ctx.exec), 8);
        rep.results = {{"operator", "S_N''"}, {"grid", grid_json(g)}, {"lowest", e.values}};
        write_spectrum_csv(csv, e.values);
    }
    rep.file(csv);
}

json inertia_json(const Inertia& in) {
    return {{"negative", in.negative},     {"zero", in.zero},
            {"zero_tol", in.zero_tol},     {"first_excluded", in.first_excluded},
            {"lowest", in.lowest}};
}

void cmd_inertia(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0, 2.0});
    // n = 4096 at L = 128 resolves the order-4 Hessian terms up to c = 3.
    const Grid g = ctx.grid_or(128.0, 4096);
    const long N = static_cast<long>(p.count());
    const Inertia whole = inertia(assemble_LN(p, g, ctx.exec), nsoliton_kernel(p, g));
    json singles = json::array();
    long neg = 0, zero = 0;
    for (std::size_t j = 0; j < p.count(); ++j) {
        const Inertia in = inertia(assemble_LNj(p.speeds, j, g, ctx.exec), soliton_kernel(p.speeds[j], g));
        neg += in.negative;
        zero += in.zero;
        json row = inertia_json(in);
        row["j"] = j + 1;
        singles.push_back(row);
    }
    rep.results = inertia_json(whole);
    rep.results["grid"] = grid_json(g);
    rep.results["kernel_magnitude"] = whole.kernel_magnitude;
    rep.results["single_soliton"] = singles;
    rep.results["single_sum"] = {{"negative", neg}, {"zero", zero}};
    rep.check_count("negative", whole.negative, (N + 1) / 2);
    rep.check_count("zero", whole.zero, N);
    rep.check_count("single_sum_negative", neg, whole.negative);
    rep.check_count("single_sum_zero", zero, whole.zero);
    const fs::path csv = ctx.out("inertia_spectrum.csv");
    write_spectrum_csv(csv, whole.lowest);
    rep.file(csv);
}

void cmd_scaling(const Context& ctx, Report& rep) {
    // --speeds c1,b1,b2,... sweeps the pairs (c1, b).
    const std::vector<double> s = ctx.cfg.speeds.empty() ? std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0} : ctx.cfg.speeds;
    if (s.size() < 2) throw UsageError("scaling needs --speeds c1,b1[,b2...]");
    for (double v : s)
        if (!(v > 0.0)) throw UsageError("speeds must be positive");
    std::vector<std::vector<double>> sweep;
    for (std::size_t k = 1; k < s.size(); ++k) {
        if (!(s[k] > s[0])) throw UsageError("each b must exceed c1");
        sweep.push_back({s[0], s[k]});
    }
    const Grid g = ctx.grid_or(128.0, 4096);
    const double spread_phase = 20.0;
    const ScalingTable one = theorem13_scaling({{s[0]}}, g, 0.0, ctx.exec);
    const ScalingTable table = theorem13_scaling(sweep, g, spread_phase, ctx.exec);
    const double golden_err = std::abs(one.rows.front().ratio - kGolden);
    json rows = json::array();
    std::ofstream csv_stream;
    const fs::path csv = ctx.out("scaling.csv");
    ensure_parent(csv);
    csv_stream.open(csv);
    csv_stream << "c1,c2,nu,nu_single,predicted,ratio,ratio_single\n";
    csv_stream.precision(17);
    for (const auto& r : table.rows) {
        rows.push_back({{"speeds", r.speeds},  {"nu", r.nu},       {"nu_single", r.nu_single},
                        {"predicted", r.predicted}, {"ratio", r.ratio}, {"ratio_single", r.ratio_single}});
        csv_stream << r.speeds[0] << ',' << r.speeds[1] << ',' << r.nu << ',' << r.nu_single << ',' << r.predicted << ','
                   << r.ratio << ',' << r.ratio_single << '\n';
    }
    rep.results = {{"grid", grid_json(g)},
                   {"phase_spread", spread_phase},
                   {"rows", rows},
                   {"mean_ratio", table.mean_ratio.front()},
                   {"spread", table.spread.front()},
                   {"spread_single", table.spread_single.front()},
                   {"n1_ratio", one.rows.front().ratio}};
    rep.check("ratio_spread", table.spread.front(), ctx.tol.get("scaling_spread"),
              table.spread.front() <= ctx.tol.get("scaling_spread"));
    rep.check("n1_golden_ratio", golden_err, ctx.tol.get("golden_ratio_abs"), golden_err <= ctx.tol.get("golden_ratio_abs"));
    rep.file(csv);
}

EvolutionConfig evolution_config(const Context& ctx, double default_T) {
    EvolutionConfig cfg;
    cfg.grid = ctx.grid_or(512.0, 16384);
    cfg.dt = ctx.cfg.dt.value_or(5e-4);
    cfg.final_time = ctx.cfg.final_time.value_or(default_T);
    cfg.snapshot_interval = 1.0;
    cfg.keep_fields = false;
    cfg.validate();
    return cfg;
}

void cmd_evolve(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0});
    const EvolutionConfig cfg = evolution_config(ctx, 10.0);
    const Grid& g = cfg.grid;
    const RealField u0 = nsoliton_tau(p, g, TauSign::positive, ctx.exec);
    const EvolutionTrace trace = evolve(u0, cfg);
    const SolitonParams later = SolitonParams::make(p.speeds, p.phases, p.time + cfg.final_time);
    const double err = relative_l2(trace.final_state, nsoliton_tau(later, g, TauSign::positive, ctx.exec));
    const double drift = std::max(trace.relative_drift(1), trace.relative_drift(2));
    const char* err_name = p.count() == 1 ? "transport_rel" : "collision_rel";
    rep.results = {{"grid", grid_json(g)},     {"dt", cfg.dt},         {"T", cfg.final_time},
                   {"rel_l2_vs_exact", err}, {"drift_H1_H2", drift}, {"warnings", trace.warnings}};
    rep.check(err_name, err, ctx.tol.get(err_name), err <= ctx.tol.get(err_name));
    rep.check("drift_rel", drift, ctx.tol.get("drift_rel"), drift <= ctx.tol.get("drift_rel"));
    const fs::path csv = ctx.out("evolve_trace.csv");
    write_trace_csv(csv, trace.times, trace.conserved, trace.distances);
    rep.file(csv);
    write_field_pair(ctx, rep, "evolve_final", trace.final_state);
}

void cmd_stability(const Context& ctx, Report& rep) {
    const SolitonParams p = ctx.params({1.0});
    const EvolutionConfig cfg = evolution_config(ctx, 20.0);
    const double delta = ctx.cfg.delta.value_or(1e-3);
    if (!(delta >= 0.0)) throw UsageError("delta must be non-negative");
    const double factor = ctx.tol.get("stability_factor");
    const StabilityReport s = stability_experiment(p, delta, cfg.final_time, cfg, ctx.cfg.seed, factor);
    const double limit = delta > 0.0 ? factor * delta : ctx.tol.get("control_distance");
    rep.results = {{"grid", grid_json(cfg.grid)},
                   {"dt", cfg.dt},
                   {"T", cfg.final_time},
                   {"delta", delta},
                   {"perturbation_norm", s.perturbation_norm},
                   {"sup_distance", s.sup_distance},
                   {"times", s.times},
                   {"distances", s.distances}};
    rep.check(delta > 0.0 ? "sup_distance" : "control_distance", s.sup_distance, limit, s.sup_distance <= limit);
    const fs::path csv = ctx.out("stability_trace.csv");
    write_trace_csv(csv, s.times, s.conserved, s.distances);
    rep.file(csv);
}

void cmd_report_all(const Context& ctx, Report& rep) {
    const std::string preset = ctx.cfg.preset.empty() ? "paper" : ctx.cfg.preset;
    std::vector<int> ids;
    if (preset == "paper") {
        for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
    } else if (preset == "quick") {
        ids = {1, 2, 3, 4, 5, 10};
    } else {
        throw UsageError("unknown preset '" + preset + "' (paper, quick)");
    }
    AcceptanceOptions opt;
    opt.tol = ctx.tol;
    opt.exec = ctx.exec;
    opt.seed = ctx.cfg.seed;
    std::vector<CriterionResult> results;
    for (int id : ids) {
        results.push_back(run_criterion(id, opt));
        std::printf("%s\n", format_line(results.back()).c_str());
        std::fflush(stdout);
    }
    rep.results = acceptance_report(results, opt);
    rep.results["preset"] = preset;
    const fs::path csv = ctx.out("report-all.csv");
    ensure_parent(csv);
    std::ofstream out(csv);
    out << "criterion,title,pass,summary\n";
    for (const auto& r : results) {
        rep.check_flag("criterion " + std::to_string(r.id) + " " + r.title, r.pass, r.summary);
        std::string summary = r.summary;
        std::replace(summary.begin(), summary.end(), ',', ';');
        out << r.id << ',' << r.title << ',' << (r.pass ? "PASS" : "FAIL") << ',' << summary << '\n';
    }
    rep.file(csv);
}

using Command = void (*)(const Context&, Report&);

const std::map<std::string, std::pair<Command, const char*>>& commands() {
    static const std::map<std::string, std::pair<Command, const char*>> table = {
        {"construct", {cmd_construct, "N-soliton field from the tau function, checked against the scattering formula"}},
        {"functionals", {cmd_functionals, "conserved tower H_1..H_5 against the trace identities"}},
        {"variational", {cmd_variational, "Euler-Lagrange residual, multiplier fit and the D matrix"}},
        {"spectrum", {cmd_spectrum, "lowest eigenvalues of L_1 (one speed) or of the N-soliton Hessian"}},
        {"inertia", {cmd_inertia, "negative and zero eigenvalue counts of the N-soliton Hessian"}},
        {"scaling", {cmd_scaling, "negative eigenvalue scaling over the sweep (c1, b)"}},
        {"evolve", {cmd_evolve, "time evolution compared with the exact solution"}},
        {"stability", {cmd_stability, "perturbed evolution and orbital distance"}},
        {"report-all", {cmd_report_all, "every acceptance check in one report"}},
    };
    return table;
}

// Flags as given on the command line; unset ones leave the config file value.
struct Flags {
    std::string config, speeds, phases, grid, out, tol_overrides, preset;
    double t = 0.0, dt = 0.0, T = 0.0, delta = 0.0;
    std::uint64_t seed = 0;
    bool serial = false;
};

void add_flags(CLI::App& sub, Flags& f, std::map<std::string, CLI::Option*>& opts) {
    opts["config"] = sub.add_option("--config", f.config, "config file with 'key = value' lines");
    opts["speeds"] = sub.add_option("--speeds", f.speeds, "comma separated speeds, e.g. 1,2,3");
    opts["phases"] = sub.add_option("--phases", f.phases, "comma separated phases (default zeros)");
    opts["t"] = sub.add_option("--t", f.t, "time at which the N-soliton is sampled");
    opts["grid"] = sub.add_option("--grid", f.grid, "half length and point count, L:n");
    opts["dt"] = sub.add_option("--dt", f.dt, "time step");
    opts["T"] = sub.add_option("--T", f.T, "final time");
    opts["delta"] = sub.add_option("--delta", f.delta, "perturbation size");
    opts["seed"] = sub.add_option("--seed", f.seed, "random seed");
    opts["out"] = sub.add_option("--out", f.out, "output directory");
    opts["tol-overrides"] = sub.add_option("--tol-overrides", f.tol_overrides, "file of 'name = value' tolerances");
    opts["preset"] = sub.add_option("--preset", f.preset, "report-all preset: paper or quick");
    opts["serial"] = sub.add_flag("--serial", f.serial, "use the serial reference kernels");
}

Context build_context(const std::string& name, const Flags& f, const std::map<std::string, CLI::Option*>& opts) {
    auto given = [&](const char* key) { return opts.at(key)->count() > 0; };
    Context ctx;
    if (given("config")) {
        ctx.cfg = parse_config(read_text(f.config), f.config);
        if (!ctx.cfg.subcommand.empty() && ctx.cfg.subcommand != name)
            throw UsageError(f.config + ": subcommand '" + ctx.cfg.subcommand + "' does not match '" + name + "'");
    }
    ExperimentConfig& c = ctx.cfg;
    c.subcommand = name;
    try {
        if (given("speeds")) c.speeds = parse_real_list(f.speeds);
        if (given("phases")) c.phases = parse_real_list(f.phases);
        if (given("grid")) {
            const auto [L, n] = parse_grid_spec(f.grid);
            c.half_length = L;
            c.points = n;
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (given("t")) c.time = f.t;
    if (given("dt")) c.dt = f.dt;
    if (given("T")) c.final_time = f.T;
    if (given("delta")) c.delta = f.delta;
    if (given("seed")) c.seed = f.seed;
    if (given("out")) c.out = f.out;
    if (given("tol-overrides")) c.tol_overrides = f.tol_overrides;
    if (given("preset")) c.preset = f.preset;
    if (given("serial")) c.serial = f.serial;

    if (!c.tol_overrides.empty()) apply_tolerance_overrides(ctx.tol, read_text(c.tol_overrides), c.tol_overrides);
    if (!c.phases.empty() && !c.speeds.empty() && c.phases.size() != c.speeds.size())
        throw UsageError("--phases needs one value per speed");
    if (c.half_length && c.points) {
        try {
            (void)Grid::make(*c.half_length, *c.points);
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad grid: ") + e.what());
        }
    }
    if (!c.preset.empty() && name != "report-all") throw UsageError("--preset only applies to report-all");
    ctx.exec = c.serial ? Exec::serial : Exec::parallel;
    return ctx;
}

json report_document(const Context& ctx, const Report& rep) {
    return {{"subcommand", ctx.cfg.subcommand},
            {"config", ctx.cfg.to_json()},
            {"config_hash", ctx.cfg.hash()},
            {"tolerances", ctx.tol.to_json()},
            {"results", rep.results},
            {"checks", rep.checks()},
            {"files", rep.files},
            {"pass", rep.pass()}};
}

void print_checks(const Report& rep) {
    for (const auto& c : rep.checks()) {
        std::ostringstream line;
        line << (c["pass"].get<bool>() ? "PASS  " : "FAIL  ") << c["name"].get<std::string>();
        if (c.contains("value")) line << "  " << c["value"].dump();
        if (c.contains("limit")) line << " (limit " << c["limit"].dump() << ")";
        if (c.contains("expected")) line << " (expected " << c["expected"].dump() << ")";
        std::printf("%s\n", line.str().c_str());
    }
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Benjamin-Ono N-soliton laboratory"};
    app.require_subcommand(1);
    Flags flags;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;
    for (const auto& [name, entry] : commands()) add_flags(*app.add_subcommand(name, entry.second), flags, options[name]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Context ctx;
    try {
        ctx = build_context(name, flags, options.at(name));
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    Report rep;
    try {
        fs::create_directories(ctx.cfg.out);
        commands().at(name).first(ctx, rep);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        // Parameter validation (speeds, phases, grids, step sizes).
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s failed: %s\n", name.c_str(), e.what());
        return 1;
    }

    const fs::path report = ctx.out(name + ".json");
    write_json(report, report_document(ctx, rep));
    if (name != "report-all") print_checks(rep);
    std::printf("%s: %s (report %s)\n", name.c_str(), rep.pass() ? "PASS" : "FAIL", report.string().c_str());
    return rep.pass() ? 0 : 1;
}

}  // namespace bolab
