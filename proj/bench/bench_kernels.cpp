// Serial reference kernels against their OpenMP versions. The second
// benchmark argument selects the mode: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include <random>

#include "bolab/functionals.hpp"
#include "bolab/operators.hpp"
#include "bolab/random.hpp"
#include "bolab/solitons.hpp"

using namespace bolab;

namespace {

Exec mode(const benchmark::State& s) { return s.range(1) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(1) == 0 ? "serial" : "openmp"); }

const SolitonParams kThree = SolitonParams::make({1.0, 2.0, 3.0}, {-5.0, 0.0, 5.0});

void BM_tau(benchmark::State& s) {
    const Grid g = Grid::make(128.0, static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(nsoliton_tau(kThree, g, TauSign::positive, mode(s)));
    label(s);
}

void BM_scattering(benchmark::State& s) {
    const Grid g = Grid::make(128.0, static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(nsoliton_scattering(kThree, g, mode(s)));
    label(s);
}

void BM_assemble_L1(benchmark::State& s) {
    const Grid g = Grid::make(64.0, static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(assemble_L1(1.0, g, mode(s)));
    label(s);
}

void BM_assemble_hessian(benchmark::State& s) {
    const Grid g = Grid::make(64.0, static_cast<std::size_t>(s.range(0)));
    const RealField u = nsoliton_tau(SolitonParams::make({1.0, 2.0}, {0.0, 0.0}), g);
    HessianOptions opt;
    opt.probe_check = false;
    for (auto _ : s) benchmark::DoNotOptimize(assemble_hessian({2.0, 3.0, 1.0}, u, mode(s), opt));
    label(s);
}

void BM_fd_gradient(benchmark::State& s) {
    const Grid g = Grid::make(16.0, static_cast<std::size_t>(s.range(0)));
    std::mt19937_64 rng(1);
    const RealField u = band_limited_noise(g, rng, 2.0);
    for (auto _ : s) benchmark::DoNotOptimize(fd_gradient(u, 3, mode(s)));
    label(s);
}

}  // namespace

BENCHMARK(BM_tau)->ArgsProduct({{4096, 16384}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_scattering)->ArgsProduct({{4096, 16384}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_L1)->ArgsProduct({{512, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_hessian)->ArgsProduct({{512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fd_gradient)->ArgsProduct({{128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
