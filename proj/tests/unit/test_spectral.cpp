#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bolab/random.hpp"
#include "bolab/solitons.hpp"
#include "bolab/spectral.hpp"

using namespace bolab;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const RealField& a, const RealField& b) { return max_abs(a - b); }

RealField noise(const Grid& g, std::uint64_t seed, double cut = 3.0) {
    std::mt19937_64 rng(seed);
    return band_limited_noise(g, rng, cut);
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g = Grid::make(kPi, 8);
    CHECK(g.spacing() == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(g.x(0) == doctest::Approx(-kPi));
    std::vector<double> xi = g.wavenumbers();
    std::sort(xi.begin(), xi.end());
    const std::vector<double> want = {-4, -3, -2, -1, 0, 1, 2, 3};
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(std::abs(xi[k]) - std::abs(want[k])) < 1e-14);
    // Nyquist appears once, every other nonzero wavenumber with both signs.
    CHECK(std::abs(std::abs(g.xi(g.nyquist())) - 4.0) < 1e-14);

    CHECK(Grid::make(256.0, 4096).spacing() == 0.125);
    CHECK(Grid::make(256.0, 4096).spacing() * 4096 == doctest::Approx(512.0));
}

TEST_CASE("grid rejects bad sizes") {
    CHECK_THROWS_AS(Grid::make(1.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(1.0, 6), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(std::nan(""), 16), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make(-1.0, 16), std::invalid_argument);
}

TEST_CASE("fields reject wrong sizes and non-finite samples") {
    const Grid g = Grid::make(1.0, 8);
    CHECK_THROWS(RealField(g, std::vector<double>(7, 0.0)));
    std::vector<double> v(8, 0.0);
    v[3] = std::nan("");
    CHECK_THROWS(RealField(g, v));
    CHECK_THROWS_AS(RealField(g) + RealField(Grid::make(2.0, 8)), GridMismatch);
}

TEST_CASE("hilbert of sin is cos") {
    const Grid g = Grid::make(kPi, 64);
    const RealField s = sample(g, [](double x) { return std::sin(x); });
    const RealField c = sample(g, [](double x) { return std::cos(x); });
    CHECK(max_diff(hilbert(s), c) <= 1e-12);
    CHECK(max_diff(derivative(s), c) <= 1e-12);
}

TEST_CASE("hilbert squared is minus identity away from the zero and Nyquist modes") {
    const Grid g = Grid::make(10.0, 256);
    const RealField f = noise(g, 1);
    const RealField hh = hilbert(hilbert(f));
    CHECK(max_diff(hh, -1.0 * f) <= 1e-12);

    // Per mode.
    const auto a = spectrum(f), b = spectrum(hh);
    for (std::size_t k = 1; k < g.size(); ++k) {
        if (k == g.nyquist()) {
            CHECK(std::abs(b[k]) <= 1e-12);
            continue;
        }
        CHECK(std::abs(b[k] + a[k]) <= 1e-10 * (1.0 + std::abs(a[k])));
    }
}

TEST_CASE("hilbert is skew-adjoint and swaps parity") {
    const Grid g = Grid::make(8.0, 128);
    const RealField f = noise(g, 2), h = noise(g, 3);
    CHECK(std::abs(inner(hilbert(f), h) + inner(f, hilbert(h))) <= 1e-12);

    const RealField even = sample(g, [](double x) { return std::exp(-x * x) * (1.0 + x * x); });
    const RealField he = hilbert(even);
    CHECK(max_diff(reflect(he), -1.0 * he) <= 1e-12);
    const RealField odd = sample(g, [](double x) { return x * std::exp(-x * x); });
    const RealField ho = hilbert(odd);
    CHECK(max_diff(reflect(ho), ho) <= 1e-12);
}

TEST_CASE("hilbert of the soliton") {
    // H Q_1 = -x Q_1 on the line; the periodic error is O(1/L).
    const Grid g = Grid::make(256.0, 4096);
    const RealField q = one_soliton(1.0, 0.0, 0.0, g);
    const RealField want = sample(g, [](double x) { return -2.0 * x / (x * x + 1.0); });
    const RealField hq = hilbert(q);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.x(i)) <= 20.0) worst = std::max(worst, std::abs(hq[i] - want[i]));
    CHECK(worst <= 2.0 / 256.0);
}

TEST_CASE("analytic projections") {
    const Grid g = Grid::make(kPi, 32);
    const ComplexField e = to_complex(sample(g, [](double x) { return std::cos(x); }));
    ComplexField eix(g);
    for (std::size_t i = 0; i < g.size(); ++i) eix[i] = std::exp(cplx(0.0, g.x(i)));
    CHECK(max_abs(project_plus(eix) - eix) <= 1e-13);
    (void)e;

    const Grid h = Grid::make(12.0, 256);
    RealField u = noise(h, 4);
    for (auto& v : u) v += 0.3;  // nonzero mean on purpose
    const ComplexField diff = project_plus(u) - project_minus(u);
    CHECK(max_abs(diff - to_complex(u)) <= 1e-13);

    const RealField z = noise(h, 5);
    CHECK(max_abs(project_plus(project_minus(z))) <= 1e-13);
}

TEST_CASE("derivatives") {
    const Grid g = Grid::make(256.0, 4096);
    const RealField q = one_soliton(1.0, 0.0, 0.0, g);
    CHECK(std::abs(derivative(q)[g.size() / 2]) <= 1e-10);  // x = 0
    RealField c(g);
    for (auto& v : c) v = 3.5;
    CHECK(max_abs(derivative(c)) <= 1e-12);
    CHECK(max_abs(derivative(c, 3)) <= 1e-12);

    const Grid p = Grid::make(kPi, 64);
    const RealField s = sample(p, [](double x) { return std::sin(2.0 * x); });
    CHECK(max_diff(derivative(s, 2), -4.0 * s) <= 1e-11);
}

TEST_CASE("quadrature and norms") {
    const Grid g = Grid::make(256.0, 4096);
    const RealField q = one_soliton(1.0, 0.0, 0.0, g);
    CHECK(std::abs(integrate(q) - 2.0 * kPi) / (2.0 * kPi) <= 1e-2);

    const Grid h = Grid::make(6.0, 128);
    const RealField u = noise(h, 6);
    CHECK(std::abs(sobolev_norm(u, 0.0) - std::sqrt(inner(u, u))) <= 1e-12);
    CHECK(l2_norm(u) == doctest::Approx(std::sqrt(inner(u, u))).epsilon(1e-14));
    CHECK(sobolev_norm(u, 1.0) > sobolev_norm(u, 0.0));
    CHECK_THROWS_AS(inner(u, one_soliton(1.0, 0.0, 0.0, g)), GridMismatch);
}

TEST_CASE("transform round trip") {
    const Grid g = Grid::make(3.0, 64);
    const RealField u = noise(g, 7);
    CHECK(max_diff(real_from_spectrum(g, spectrum(u)), u) <= 1e-14);
    CHECK(signed_index(0, 8) == 0);
    CHECK(signed_index(3, 8) == 3);
    CHECK(signed_index(4, 8) == -4);
    CHECK(signed_index(7, 8) == -1);
}
