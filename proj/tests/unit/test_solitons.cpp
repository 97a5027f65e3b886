#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bolab/io.hpp"
#include "bolab/operators.hpp"
#include "bolab/solitons.hpp"
#include "bolab/spectral.hpp"

using namespace bolab;

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t index_of(const Grid& g, double x) {
    return static_cast<std::size_t>(std::lround((x + g.half_length()) / g.spacing()));
}

// Matrix-free L_1 = -H d/dx + c - 2 Q_c, for grids too large to assemble.
RealField apply_L1(double c, const RealField& v) {
    return apply_low_order_hessian({c, 1.0}, one_soliton(c, 0.0, 0.0, v.grid()), v);
}

SolitonParams random_params(std::mt19937_64& rng, int N) {
    std::uniform_real_distribution<double> speed(0.5, 3.0), phase(-5.0, 5.0), time(-2.0, 2.0);
    std::vector<double> c(static_cast<std::size_t>(N)), x(static_cast<std::size_t>(N));
    do {
        for (auto& v : c) v = speed(rng);
        std::sort(c.begin(), c.end());
    } while (std::adjacent_find(c.begin(), c.end(), [](double a, double b) { return b - a < 0.05; }) != c.end());
    for (auto& v : x) v = phase(rng);
    return SolitonParams::make(c, x, time(rng));
}

}  // namespace

TEST_CASE("one soliton samples") {
    const Grid g = Grid::make(256.0, 4096);
    CHECK(one_soliton(1.0, 0.0, 0.0, g)[index_of(g, 0.0)] == doctest::Approx(2.0).epsilon(1e-15));
    const RealField moved = one_soliton(2.0, 0.0, 3.0, g);
    const auto peak = std::max_element(moved.begin(), moved.end()) - moved.begin();
    CHECK(g.x(static_cast<std::size_t>(peak)) == doctest::Approx(6.0));
    CHECK(moved[index_of(g, 6.0)] == doctest::Approx(4.0));
    CHECK_THROWS_AS(one_soliton(0.0, 0.0, 0.0, g), std::invalid_argument);
    CHECK_THROWS_AS(one_soliton(-1.0, 0.0, 0.0, g), std::invalid_argument);
}

TEST_CASE("stationary equation residual at L=256, n=4096") {
    // -H Q' - Q^2 + c Q = 0 on the line. The periodized profile carries a 1/L^2
    // tail error.
    const Grid g = Grid::make(256.0, 4096);
    const RealField q = one_soliton(1.0, 0.0, 0.0, g);
    const RealField r = -1.0 * hilbert(derivative(q)) - times(q, q) + q;
    CHECK(max_abs(r) <= 1e-6);
}

TEST_CASE("stationary residual shrinks like 1/L^2") {
    double prev = 0.0;
    for (double L : {128.0, 256.0, 512.0}) {
        const Grid g = Grid::make(L, static_cast<std::size_t>(16.0 * L));
        const RealField q = one_soliton(1.0, 0.0, 0.0, g);
        const double r = max_abs(-1.0 * hilbert(derivative(q)) - times(q, q) + q);
        if (prev > 0.0) CHECK(prev / r >= 3.5);
        prev = r;
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SolitonParams::make({2.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SolitonParams::make({1.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SolitonParams::make({1.0, 2.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SolitonParams::make({-1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SolitonParams::make({}, {}), std::invalid_argument);
    CHECK_NOTHROW(SolitonParams::make({0.5, 1.0, 3.0}, {1.0, -2.0, 0.0}, 4.0));
}

TEST_CASE("scattering data") {
    const ScatteringData d = scattering_data(SolitonParams::make({1.0, 2.0}, {0.5, -1.0}, 0.0));
    CHECK(d.lambda[0] == -0.5);
    CHECK(d.lambda[1] == -1.0);
    CHECK(d.gamma[0].imag() == doctest::Approx(1.0));
    CHECK(d.gamma[1].imag() == doctest::Approx(0.5));
    CHECK(d.gamma[0].real() == doctest::Approx(-0.5));
}

TEST_CASE("tau function reproduces one soliton") {
    const Grid g = Grid::make(64.0, 1024);
    const RealField tau = nsoliton_tau(SolitonParams::make({1.0}, {0.0}), g);
    CHECK(max_abs(tau - one_soliton(1.0, 0.0, 0.0, g)) <= 1e-12);
    // The formula as printed gives the negative profile.
    const RealField printed = nsoliton_tau(SolitonParams::make({1.0}, {0.0}), g, TauSign::as_printed);
    CHECK(max_abs(printed + one_soliton(1.0, 0.0, 0.0, g)) <= 1e-12);
}

TEST_CASE("two-soliton splits into one-solitons at t = +-30") {
    const Grid g = Grid::make(512.0, 8192);
    for (double t : {-30.0, 30.0}) {
        const RealField u = nsoliton_tau(SolitonParams::make({1.0, 2.0}, {0.0, 0.0}, t), g);
        const RealField sum = one_soliton(1.0, 0.0, t, g) + one_soliton(2.0, 0.0, t, g);
        CHECK(l2_norm(u - sum) <= 1e-3);
    }
}

TEST_CASE("two-soliton approaches the superposition as |t| doubles") {
    const Grid g = Grid::make(512.0, 8192);
    double prev = 1e300;
    for (double t : {7.5, 15.0, 30.0}) {
        const RealField u = nsoliton_tau(SolitonParams::make({1.0, 2.0}, {0.0, 0.0}, t), g);
        const double d = l2_norm(u - one_soliton(1.0, 0.0, t, g) - one_soliton(2.0, 0.0, t, g));
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("N-soliton is positive and carries mass 2 pi N") {
    std::mt19937_64 rng(11);
    const Grid g = Grid::make(256.0, 4096);
    for (int N = 1; N <= 3; ++N) {
        for (int k = 0; k < 3; ++k) {
            const SolitonParams p = random_params(rng, N);
            const RealField u = nsoliton_tau(p, g);
            CHECK(*std::min_element(u.begin(), u.end()) > 0.0);
            // Each soliton loses about 4 / (c L) to the truncated tails.
            double tail = 0.0;
            for (double c : p.speeds) tail += 4.0 / (c * g.half_length());
            CHECK(std::abs(integrate(u) - 2.0 * kPi * N) <= 2.0 * tail);
        }
    }
}

TEST_CASE("scattering construction") {
    const Grid g = Grid::make(64.0, 1024);
    SUBCASE("N=1 Jost function") {
        const SolitonParams p = SolitonParams::make({1.5}, {0.7}, 0.3);
        const ScatteringFields s = nsoliton_scattering(p, g);
        const cplx gamma = scattering_data(p).gamma[0];
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(s.phi[0][i] - 1.0 / (g.x(i) + gamma)));
        CHECK(worst <= 1e-13);
    }
    SUBCASE("N=2 matches the tau function and both expressions agree") {
        const SolitonParams p = SolitonParams::make({1.0, 2.0}, {0.0, 0.0});
        const ScatteringFields s = nsoliton_scattering(p, g);
        CHECK(max_abs(s.u - nsoliton_tau(p, g)) <= 1e-10);
        CHECK(max_abs(s.u - s.u_linear) <= 1e-10);
    }
    SUBCASE("random parameters, N <= 3") {
        std::mt19937_64 rng(5);
        for (int N = 1; N <= 3; ++N)
            for (int k = 0; k < 4; ++k) {
                const SolitonParams p = random_params(rng, N);
                const ScatteringFields s = nsoliton_scattering(p, g);
                CHECK(max_abs(s.u - nsoliton_tau(p, g)) <= 1e-10);
                CHECK(max_abs(s.u - s.u_linear) <= 1e-10);
            }
    }
}

TEST_CASE("parallel and serial constructions are bit-identical") {
    const Grid g = Grid::make(64.0, 1024);
    const SolitonParams p = SolitonParams::make({0.7, 1.3, 2.9}, {-3.0, 0.5, 4.0}, 0.25);
    const RealField a = nsoliton_tau(p, g, TauSign::positive, Exec::serial);
    const RealField b = nsoliton_tau(p, g, TauSign::positive, Exec::parallel);
    CHECK(a.values() == b.values());
    const ScatteringFields s = nsoliton_scattering(p, g, Exec::serial);
    const ScatteringFields t = nsoliton_scattering(p, g, Exec::parallel);
    CHECK(s.u.values() == t.u.values());
}

TEST_CASE("dQ/dc") {
    const Grid g = Grid::make(256.0, 4096);
    const RealField d = dQ_dc(1.0, g);
    CHECK(d[index_of(g, 0.0)] == doctest::Approx(2.0));
    CHECK(std::abs(inner(one_soliton(1.0, 0.0, 0.0, g), d) - kPi) <= 1e-3);
    const double eps = 1e-4;
    for (double c : {0.5, 1.0, 2.0}) {
        const RealField fd = (1.0 / (2.0 * eps)) * (one_soliton(c + eps, 0.0, 0.0, g) - one_soliton(c - eps, 0.0, 0.0, g));
        CHECK(max_abs(fd - dQ_dc(c, g)) <= 1e-7);
    }
}

TEST_CASE("phase derivatives match finite differences") {
    const Grid g = Grid::make(64.0, 1024);
    const SolitonParams p = SolitonParams::make({1.0, 2.0}, {0.5, -0.5});
    const auto d = phase_derivatives(p, g);
    const double eps = 1e-5;
    for (std::size_t j = 0; j < 2; ++j) {
        SolitonParams plus = p, minus = p;
        plus.phases[j] += eps;
        minus.phases[j] -= eps;
        const RealField fd = (1.0 / (2.0 * eps)) * (nsoliton_tau(plus, g) - nsoliton_tau(minus, g));
        CHECK(max_abs(fd - d[j]) <= 1e-7);
    }
}

TEST_CASE("eigenfunction catalog of L_1") {
    const Grid g = Grid::make(256.0, 4096);
    const EigenCatalog cat = eigen_catalog(g);
    CHECK(cat.lambda_minus == doctest::Approx(-(1.0 + std::sqrt(5.0)) / 2.0));
    CHECK(cat.lambda_plus == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));
    CHECK(std::abs(inner(cat.eta_minus, cat.eta_plus)) <= 1e-6);

    // Inner products against the generalized eigenfunctions need a window.
    const RealField psi = cat.generalized(1.0);
    const RealField w = sample(g, [](double x) { return std::exp(-x * x / (2.0 * 40.0 * 40.0)); });
    CHECK(std::abs(inner(times(psi, w), cat.eta0)) <= 1e-4);
}

TEST_CASE("eigenfunction catalog is orthonormal") {
    const Grid g = Grid::make(256.0, 4096);
    const EigenCatalog cat = eigen_catalog(g);
    const std::vector<RealField> e = {cat.eta0, cat.eta_minus, cat.eta_plus, cat.eta_one};
    for (std::size_t j = 0; j < e.size(); ++j)
        for (std::size_t k = 0; k < e.size(); ++k) {
            CAPTURE(j);
            CAPTURE(k);
            CHECK(std::abs(inner(e[j], e[k]) - (j == k ? 1.0 : 0.0)) <= 1e-6);
        }
}

TEST_CASE("catalog eigenfunctions solve the L_1 eigenproblem") {
    // The residual decays like L^-1.5, so the long domain is needed for 1e-5.
    const Grid g = Grid::make(4096.0, 65536);
    const EigenCatalog cat = eigen_catalog(g);
    CHECK(l2_norm(apply_L1(1.0, cat.eta_minus) - cat.lambda_minus * cat.eta_minus) <= 1e-5);
    CHECK(l2_norm(apply_L1(1.0, cat.eta_plus) - cat.lambda_plus * cat.eta_plus) <= 1e-5);
    CHECK(l2_norm(apply_L1(1.0, cat.eta0)) <= 1e-5);
    const RealField q = one_soliton(1.0, 0.0, 0.0, g);
    const RealField x = sample(g, [](double s) { return s; });
    CHECK(l2_norm(apply_L1(1.0, q + times(x, derivative(q))) + q) <= 1e-5);
}

TEST_CASE("soliton parameter files") {
    const SolitonParams p = parse_soliton_params("# two solitons\nspeeds = [1, 2]\nphases = [0.5, -1]\nt = 3\n");
    CHECK(p.speeds == std::vector<double>{1.0, 2.0});
    CHECK(p.phases == std::vector<double>{0.5, -1.0});
    CHECK(p.time == 3.0);
    const SolitonParams q = parse_soliton_params("speeds = [1.5]\n");
    CHECK(q.phases == std::vector<double>{0.0});

    auto line_of = [](const std::string& text) {
        try {
            parse_soliton_params(text, "params.txt");
        } catch (const IoError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("speeds = [1, 2]\ncolour = blue\n") == 2);
    CHECK(line_of("speeds = [1, 2]\nspeeds = [3]\n") == 2);
    CHECK(line_of("\n\nspeeds = 1, 2\n") == 3);
    CHECK(line_of("speeds = [2, 1]\n") == 1);
    CHECK(line_of("phases = [0]\n") != 0);
    CHECK(line_of("speeds = [1, x]\n") == 1);
}
