#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bolab/field.hpp"
#include "bolab/solitons.hpp"

namespace bolab {

struct EvolutionConfig {
    Grid grid;
    double dt = 1e-3;
    double final_time = 1.0;
    double dealias = 2.0 / 3.0;
    double snapshot_interval = 1.0;  // 0 keeps only the initial and final states
    bool filter_initial = true;      // project u0 onto the dealiased band
    bool keep_fields = true;

    void validate() const;
    std::size_t steps() const;
};

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<RealField> fields;
    std::vector<std::vector<double>> conserved;  // H_0 .. H_3 per snapshot
    std::vector<double> distances;               // filled when an observer is attached
    std::vector<std::string> warnings;
    RealField final_state;

    // max over snapshots of |H_n(t) / H_n(0) - 1|
    double relative_drift(int n) const;
};

class EvolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Called at each snapshot with (field, time since start); returns a distance.
using SnapshotObserver = std::function<double(const RealField&, double)>;

EvolutionTrace evolve(const RealField& u0, const EvolutionConfig& cfg, const SnapshotObserver& observer = {});

double stable_time_step(const RealField& u);

struct OrbitalOptions {
    double sobolev_index = -1.0;  // negative selects N/2
    double tau_seed = 0.0;
    std::vector<double> y_seed;   // defaults to zeros
    double y_bound = -1.0;        // negative selects L/4
    double coarse_half_width = 2.0;
    double coarse_step = 0.25;
    double xtol = 1e-10;
    int max_iterations = 4000;
};

// tau* is returned as the seed: U(tau; c, y) depends only on y_j + c_j tau,
// so the fitted phases y* absorb any shift in tau.
struct OrbitalFit {
    double distance = 0.0;
    double tau = 0.0;
    std::vector<double> y;
    bool converged = false;
    int iterations = 0;
};

OrbitalFit orbital_distance(const RealField& u, const std::vector<double>& speeds, const OrbitalOptions& opt = {});

struct StabilityReport {
    std::vector<double> speeds;
    double delta = 0.0;
    double final_time = 0.0;
    std::uint64_t seed = 0;
    double factor = 10.0;
    double perturbation_norm = 0.0;
    double sup_distance = 0.0;
    std::vector<double> times;
    std::vector<double> distances;
    std::vector<std::vector<double>> conserved;
    bool pass = false;
};

// Perturbation of Sobolev norm delta (index N/2): smooth pseudo-random field
// drawn from the seed, windowed around the solitons.
RealField stability_perturbation(const SolitonParams& p, const Grid& g, double delta, std::uint64_t seed);

StabilityReport stability_experiment(const SolitonParams& p, double delta, double final_time, EvolutionConfig cfg,
                                     std::uint64_t seed, double factor = 10.0);

}  // namespace bolab
