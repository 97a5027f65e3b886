#include "bolab/evolution.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bolab/functionals.hpp"
#include "bolab/random.hpp"
#include "bolab/spectral.hpp"

namespace bolab {

void EvolutionConfig::validate() const {
    if (!grid.valid()) throw std::invalid_argument("evolution needs a grid");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
    if (!(final_time >= dt)) throw std::invalid_argument("final time must be at least one time step");
    if (!(dealias > 0.0 && dealias <= 1.0)) throw std::invalid_argument("dealias fraction must lie in (0, 1]");
    if (snapshot_interval < 0.0) throw std::invalid_argument("snapshot interval must be non-negative");
}

std::size_t EvolutionConfig::steps() const { return static_cast<std::size_t>(std::llround(final_time / dt)); }

double EvolutionTrace::relative_drift(int n) const {
    double worst = 0.0;
    const auto k = static_cast<std::size_t>(n);
    for (const auto& c : conserved) worst = std::max(worst, std::abs(c[k] / conserved.front()[k] - 1.0));
    return worst;
}

double stable_time_step(const RealField& u) { return u.grid().spacing() / (4.0 * max_abs(u)); }

namespace {

// Lawson (integrating factor) RK4 for u_t = -H u_xx - (u^2)_x in Fourier space.
class Stepper {
public:
    Stepper(const Grid& g, double dt, double dealias) : n_(g.size()), dt_(dt) {
        const double cut = dealias * static_cast<double>(n_ / 2);
        full_.resize(n_);
        half_.resize(n_);
        nl_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const double xi = g.xi(k);
            const cplx lin(0.0, std::abs(xi) * xi);
            full_[k] = std::exp(lin * dt);
            half_[k] = std::exp(lin * (0.5 * dt));
            const bool keep = std::abs(static_cast<double>(signed_index(k, n_))) <= cut && k != n_ / 2;
            nl_[k] = keep ? cplx(0.0, -xi) : cplx(0.0);
        }
        work_.resize(n_);
    }

    // Returns max |u| of the state at the start of the step.
    double step(std::vector<cplx>& uh) {
        std::vector<cplx> k1(n_), k2(n_), k3(n_), k4(n_), tmp(n_);
        const double umax = nonlinear(uh, k1);
        for (std::size_t k = 0; k < n_; ++k) tmp[k] = half_[k] * (uh[k] + 0.5 * dt_ * k1[k]);
        nonlinear(tmp, k2);
        for (std::size_t k = 0; k < n_; ++k) tmp[k] = half_[k] * uh[k] + 0.5 * dt_ * k2[k];
        nonlinear(tmp, k3);
        for (std::size_t k = 0; k < n_; ++k) tmp[k] = full_[k] * uh[k] + dt_ * half_[k] * k3[k];
        nonlinear(tmp, k4);
        for (std::size_t k = 0; k < n_; ++k)
            uh[k] = full_[k] * uh[k] + dt_ / 6.0 * (full_[k] * k1[k] + 2.0 * half_[k] * (k2[k] + k3[k]) + k4[k]);
        return umax;
    }

private:
    double nonlinear(const std::vector<cplx>& vh, std::vector<cplx>& out) {
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t k = 0; k < n_; ++k) work_[k] = vh[k] * inv;
        fft_backward(work_);
        double umax = 0.0;
        for (auto& w : work_) {
            const double r = w.real();
            umax = std::max(umax, std::abs(r));
            w = r * r;
        }
        fft_forward(work_);
        for (std::size_t k = 0; k < n_; ++k) out[k] = nl_[k] * work_[k];
        return umax;
    }

    std::size_t n_;
    double dt_;
    std::vector<cplx> full_, half_, nl_, work_;
};

void record(EvolutionTrace& trace, const RealField& u, double t, bool keep, const SnapshotObserver& observer) {
    trace.times.push_back(t);
    trace.conserved.push_back(conserved_tower(u, 3).values);
    if (observer) trace.distances.push_back(observer(u, t));
    if (keep) trace.fields.push_back(u);
}

}  // namespace

EvolutionTrace evolve(const RealField& u0, const EvolutionConfig& cfg, const SnapshotObserver& observer) {
    cfg.validate();
    require_same_grid(u0.grid(), cfg.grid);
    const Grid& g = cfg.grid;
    EvolutionTrace trace;

    RealField start = cfg.filter_initial ? lowpass(u0, cfg.dealias) : u0;
    const double u0max = max_abs(start);
    if (u0max > 0.0 && cfg.dt > stable_time_step(start)) {
        std::ostringstream os;
        os << "time step " << cfg.dt << " exceeds the stability bound h/(4 |u|_inf) = " << stable_time_step(start);
        trace.warnings.push_back(os.str());
    }

    const std::size_t steps = cfg.steps();
    const std::size_t cadence =
        cfg.snapshot_interval > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.snapshot_interval / cfg.dt)))
                                    : steps;
    Stepper stepper(g, cfg.dt, cfg.dealias);
    std::vector<cplx> uh = spectrum(start);
    record(trace, start, 0.0, cfg.keep_fields, observer);

    for (std::size_t s = 1; s <= steps; ++s) {
        const double umax = stepper.step(uh);
        if (!std::isfinite(umax) || umax > 100.0 * std::max(u0max, 1e-300)) {
            std::ostringstream os;
            os << "blow-up detected near t = " << static_cast<double>(s - 1) * cfg.dt << ": |u|_inf = " << umax
               << " against initial " << u0max;
            throw EvolutionError(os.str());
        }
        if (s % cadence == 0 || s == steps) {
            RealField u = real_from_spectrum(g, uh);
            record(trace, u, static_cast<double>(s) * cfg.dt, cfg.keep_fields, observer);
        }
    }
    trace.final_state = real_from_spectrum(g, uh);
    return trace;
}

namespace {

struct Objective {
    std::function<double(const std::vector<double>&)> fn;
};

double gsl_trampoline(const gsl_vector* v, void* params) {
    auto* obj = static_cast<Objective*>(params);
    std::vector<double> x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
    return obj->fn(x);
}

}  // namespace

OrbitalFit orbital_distance(const RealField& u, const std::vector<double>& speeds, const OrbitalOptions& opt) {
    const Grid& g = u.grid();
    const std::size_t N = speeds.size();
    const double s = opt.sobolev_index >= 0.0 ? opt.sobolev_index : 0.5 * static_cast<double>(N);
    const double bound = opt.y_bound > 0.0 ? opt.y_bound : 0.25 * g.half_length();
    std::vector<double> seed = opt.y_seed.empty() ? std::vector<double>(N, 0.0) : opt.y_seed;
    if (seed.size() != N) throw std::invalid_argument("one phase seed per speed is required");

    auto dist2 = [&](const std::vector<double>& y) {
        for (std::size_t j = 0; j < N; ++j)
            if (std::abs(y[j] - seed[j]) > bound) return 1e300;
        const RealField ref = nsoliton_tau(SolitonParams::make(speeds, y, opt.tau_seed), g);
        const double d = sobolev_norm(u - ref, s);
        return d * d;
    };

    // Coarse scan of a common translation around the seed.
    std::vector<double> best = seed;
    double best_val = dist2(seed);
    for (double a = -opt.coarse_half_width; a <= opt.coarse_half_width + 1e-12; a += opt.coarse_step) {
        std::vector<double> y = seed;
        for (auto& v : y) v += a;
        const double f = dist2(y);
        if (f < best_val) {
            best_val = f;
            best = y;
        }
    }

    Objective obj{dist2};
    gsl_multimin_function fn{&gsl_trampoline, N, &obj};
    gsl_vector* x = gsl_vector_alloc(N);
    gsl_vector* step = gsl_vector_alloc(N);
    for (std::size_t j = 0; j < N; ++j) {
        gsl_vector_set(x, j, best[j]);
        gsl_vector_set(step, j, 0.5 * opt.coarse_step);
    }
    gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, N);
    gsl_multimin_fminimizer_set(m, &fn, x, step);

    OrbitalFit fit;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), opt.xtol) == GSL_SUCCESS) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = it;
    fit.y.resize(N);
    for (std::size_t j = 0; j < N; ++j) fit.y[j] = gsl_vector_get(m->x, j);
    double val = m->fval;
    if (best_val < val) {  // the simplex never does worse, but keep the guard
        val = best_val;
        fit.y = best;
    }
    fit.distance = std::sqrt(std::max(val, 0.0));
    fit.tau = opt.tau_seed;
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(x);
    gsl_vector_free(step);
    return fit;
}

RealField stability_perturbation(const SolitonParams& p, const Grid& g, double delta, std::uint64_t seed) {
    if (delta == 0.0) return RealField(g);
    std::mt19937_64 rng(seed);
    RealField eta = band_limited_noise(g, rng, 2.0, 10.0);
    const double norm = sobolev_norm(eta, 0.5 * static_cast<double>(p.count()));
    eta *= delta / norm;
    return eta;
}

StabilityReport stability_experiment(const SolitonParams& p, double delta, double final_time, EvolutionConfig cfg,
                                     std::uint64_t seed, double factor) {
    if (delta < 0.0) throw std::invalid_argument("perturbation size must be non-negative");
    p.validate();
    const Grid& g = cfg.grid;
    cfg.final_time = final_time;
    cfg.keep_fields = false;

    StabilityReport rep;
    rep.speeds = p.speeds;
    rep.delta = delta;
    rep.final_time = final_time;
    rep.seed = seed;
    rep.factor = factor;

    RealField u0 = nsoliton_tau(p, g);
    const RealField eta = stability_perturbation(p, g, delta, seed);
    rep.perturbation_norm = sobolev_norm(eta, 0.5 * static_cast<double>(p.count()));
    u0 += eta;

    auto observer = [&](const RealField& u, double t) {
        OrbitalOptions opt;
        opt.tau_seed = p.time + t;
        opt.y_seed = p.phases;
        return orbital_distance(u, p.speeds, opt).distance;
    };
    const EvolutionTrace trace = evolve(u0, cfg, observer);
    rep.times = trace.times;
    rep.distances = trace.distances;
    rep.conserved = trace.conserved;
    rep.sup_distance = *std::max_element(trace.distances.begin(), trace.distances.end());
    rep.pass = rep.sup_distance <= factor * delta;
    return rep;
}

}  // namespace bolab
