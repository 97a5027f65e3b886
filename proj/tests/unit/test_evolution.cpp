#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bolab/evolution.hpp"
#include "bolab/random.hpp"
#include "bolab/solitons.hpp"
#include "bolab/spectral.hpp"

using namespace bolab;

namespace {

double rel_l2(const RealField& a, const RealField& ref) { return l2_norm(a - ref) / l2_norm(ref); }

EvolutionConfig config(const Grid& g, double dt, double T) {
    EvolutionConfig cfg;
    cfg.grid = g;
    cfg.dt = dt;
    cfg.final_time = T;
    cfg.snapshot_interval = 1.0;
    cfg.keep_fields = false;
    return cfg;
}

double max_drift(const EvolutionTrace& t) {
    double d = 0.0;
    for (int n = 0; n <= 3; ++n) d = std::max(d, t.relative_drift(n));
    return d;
}

}  // namespace

TEST_CASE("configuration is validated") {
    const Grid g = Grid::make(16.0, 64);
    EvolutionConfig cfg = config(g, 1e-3, 1.0);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.steps() == 1000);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = config(g, 1e-2, 1e-3);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = config(g, 1e-3, 1.0);
    cfg.dealias = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(evolve(one_soliton(1.0, 0.0, 0.0, Grid::make(16.0, 128)), config(g, 1e-3, 1.0)), GridMismatch);
}

TEST_CASE("an oversized time step is flagged and blows up") {
    const Grid g = Grid::make(16.0, 256);
    const RealField u = one_soliton(4.0, 0.0, 0.0, g);
    CHECK(stable_time_step(u) == doctest::Approx(g.spacing() / (4.0 * max_abs(u))));
    CHECK_THROWS_AS(evolve(u, config(g, 0.2, 50.0)), EvolutionError);
}

TEST_CASE("soliton transport") {
    const Grid g = Grid::make(512.0, 16384);
    const EvolutionTrace t = evolve(one_soliton(1.0, 0.0, 0.0, g), config(g, 5e-4, 10.0));
    CHECK(t.warnings.empty());
    CHECK(t.times.back() == doctest::Approx(10.0));
    CHECK(rel_l2(t.final_state, one_soliton(1.0, 0.0, 10.0, g)) <= 1e-4);
    CHECK(t.relative_drift(1) <= 1e-8);
    CHECK(t.relative_drift(2) <= 1e-8);
}

TEST_CASE("two-soliton collision") {
    const Grid g = Grid::make(256.0, 8192);
    const SolitonParams before = SolitonParams::make({1.0, 2.0}, {0.0, 0.0}, -10.0);
    const EvolutionTrace t = evolve(nsoliton_tau(before, g), config(g, 5e-4, 20.0));
    const RealField after = nsoliton_tau(SolitonParams::make({1.0, 2.0}, {0.0, 0.0}, 10.0), g);
    CHECK(rel_l2(t.final_state, after) <= 1e-3);
    CHECK(t.relative_drift(1) <= 1e-8);
    CHECK(t.relative_drift(2) <= 1e-8);
}

TEST_CASE("reflection reverses time") {
    // v(x, t) = u(-x, -t) solves the same equation.
    const Grid g = Grid::make(64.0, 1024);
    const RealField u0 = nsoliton_tau(SolitonParams::make({1.0, 2.0}, {-4.0, 3.0}), g);
    EvolutionConfig cfg = config(g, 1e-3, 2.0);
    cfg.keep_fields = true;
    const EvolutionTrace run = evolve(u0, cfg);
    const RealField& start = run.fields.front();  // after the dealiasing filter
    const RealField forward = run.final_state;
    const RealField back = reflect(evolve(reflect(forward), cfg).final_state);

    EvolutionConfig fine = cfg;
    fine.dt = cfg.dt / 4.0;
    const double one_way = rel_l2(forward, evolve(u0, fine).final_state);
    CAPTURE(one_way);
    CHECK(rel_l2(back, start) <= 10.0 * std::max(one_way, 1e-14));
}

TEST_CASE("conservation drift is fourth order in dt") {
    const Grid g = Grid::make(32.0, 512);
    const RealField u0 = nsoliton_tau(SolitonParams::make({1.0, 2.0}, {-3.0, 3.0}), g);
    const double coarse = max_drift(evolve(u0, config(g, 8e-3, 4.0)));
    const double fine = max_drift(evolve(u0, config(g, 4e-3, 4.0)));
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(coarse > 1e-12);
    CHECK(fine * 8.0 <= coarse);
}

TEST_CASE("serial runs are reproducible") {
    const Grid g = Grid::make(32.0, 256);
    const RealField u0 = one_soliton(1.0, 0.0, 0.0, g);
    CHECK(evolve(u0, config(g, 1e-3, 0.5)).final_state.values() == evolve(u0, config(g, 1e-3, 0.5)).final_state.values());
}

TEST_CASE("orbital distance") {
    const Grid g = Grid::make(128.0, 2048);
    SUBCASE("a family member has zero distance") {
        const std::vector<double> c = {1.0, 2.0};
        const RealField u = nsoliton_tau(SolitonParams::make(c, {1.5, -2.0}, 0.7), g);
        OrbitalOptions opt;
        opt.tau_seed = 0.7;
        opt.y_seed = {1.4, -1.9};
        const OrbitalFit f = orbital_distance(u, c, opt);
        CHECK(f.converged);
        CHECK(f.distance <= 1e-8);
        // Only y_j + c_j tau is identifiable.
        CHECK(std::abs(f.y[0] + c[0] * f.tau - (1.5 + 0.7)) <= 1e-6);
        CHECK(std::abs(f.y[1] + c[1] * f.tau - (-2.0 + 1.4)) <= 1e-6);
    }
    SUBCASE("translation is recovered") {
        const RealField u = one_soliton(1.0, 3.25, 0.0, g);
        const OrbitalFit f = orbital_distance(u, {1.0});
        CHECK(std::abs(f.y[0] + f.tau - 3.25) <= 1e-6);
    }
    SUBCASE("small noise gives a small distance") {
        const std::vector<double> c = {1.0, 2.0};
        std::mt19937_64 rng(3);
        const RealField noise = band_limited_noise(g, rng, 2.0, 10.0);
        const RealField u = nsoliton_tau(SolitonParams::make(c, {0.0, 0.0}), g) + 1e-3 * noise;
        CHECK(orbital_distance(u, c).distance <= 5e-3);
    }
}

TEST_CASE("stability experiment") {
    const Grid g = Grid::make(256.0, 4096);
    EvolutionConfig cfg = config(g, 1e-3, 20.0);
    const SolitonParams p = SolitonParams::make({1.0}, {0.0});
    const RealField eta = stability_perturbation(p, g, 1e-3, 7);
    CHECK(sobolev_norm(eta, 0.5) == doctest::Approx(1e-3).epsilon(1e-10));
    CHECK(stability_perturbation(p, g, 1e-3, 7).values() == eta.values());

    const StabilityReport rep = stability_experiment(p, 1e-3, 20.0, cfg, 7);
    CHECK(rep.sup_distance <= 1e-2);
    CHECK(rep.pass);
    const StabilityReport control = stability_experiment(p, 0.0, 20.0, cfg, 7);
    CHECK(control.sup_distance <= 1e-4);
}
