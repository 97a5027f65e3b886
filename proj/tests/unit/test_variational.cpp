#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bolab/functionals.hpp"
#include "bolab/random.hpp"
#include "bolab/solitons.hpp"
#include "bolab/spectral.hpp"
#include "bolab/variational.hpp"

using namespace bolab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_speeds(std::mt19937_64& rng, std::size_t N) {
    std::uniform_real_distribution<double> d(0.5, 3.0);
    std::vector<double> c;
    while (c.size() < N) {
        const double v = d(rng);
        bool apart = true;
        for (double w : c) apart = apart && std::abs(v - w) > 0.2;
        if (apart) c.push_back(v);
    }
    std::sort(c.begin(), c.end());
    return c;
}

// Removes the components along the given fields (Gram-Schmidt in L^2).
RealField orthogonalize(RealField v, const std::vector<RealField>& against) {
    std::vector<RealField> basis;
    for (RealField b : against) {
        for (const auto& e : basis) b = b - inner(b, e) * e;
        b = (1.0 / l2_norm(b)) * b;
        basis.push_back(b);
    }
    for (const auto& e : basis) v = v - inner(v, e) * e;
    return v;
}

}  // namespace

TEST_CASE("Vieta multipliers") {
    CHECK(vieta_multipliers({1.7}).mu == std::vector<double>{1.7});
    CHECK(vieta_multipliers({1.0, 2.0}).mu == std::vector<double>{2.0, 3.0});
    CHECK(vieta_multipliers({1.0, 2.0, 3.0}).mu == std::vector<double>{6.0, 11.0, 6.0});
    CHECK(elementary_symmetric({1.0, 2.0, 3.0}) == std::vector<double>{1.0, 6.0, 11.0, 6.0});
    CHECK(partial_symmetric({1.0, 2.0, 3.0}, 0) == std::vector<double>{1.0, 5.0, 6.0});
}

TEST_CASE("Euler-Lagrange residual") {
    const Grid g = Grid::make(256.0, 4096);
    SUBCASE("N=1") { CHECK(el_residual(SolitonParams::make({1.0}, {0.0}), g) <= 1e-6); }
    SUBCASE("N=2") { CHECK(el_residual(SolitonParams::make({1.0, 2.0}, {0.0, 0.0}), g) <= 1e-5); }
    SUBCASE("wrong multipliers are detected") {
        const SolitonParams p = SolitonParams::make({1.0, 2.0}, {0.0, 0.0});
        CHECK(el_residual(p, g, Multipliers{{3.0, 2.0}}) >= 1e-1);
    }
    SUBCASE("functional gradients agree") {
        const SolitonParams p = SolitonParams::make({1.0, 2.0}, {0.0, 0.0});
        CHECK(el_residual(p, g, GradientSource::functional) <= 1e-3);
    }
}

// The squared-eigenfunction residual is exact to roundoff, so refinement is
// measured with gradients of the functionals on the sampled profile.
TEST_CASE("Euler-Lagrange residual shrinks 4x under refinement") {
    const SolitonParams p = SolitonParams::make({1.0, 2.0}, {0.0, 0.0});
    const double coarse = el_residual(p, Grid::make(128.0, 2048), GradientSource::functional);
    const double fine = el_residual(p, Grid::make(256.0, 8192), GradientSource::functional);
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(fine <= coarse / 4.0);
}

// The oracle error comes from the periodized tails and falls like 1/L^2.
TEST_CASE("multiplier oracle reproduces Vieta") {
    const Grid g = Grid::make(8192.0, 262144);
    SUBCASE("N=1, c=2") {
        const Multipliers m = multiplier_oracle(SolitonParams::make({2.0}, {0.0}), Grid::make(32768.0, 1048576));
        REQUIRE(m.mu.size() == 1);
        CHECK(std::abs(m.mu[0] - 2.0) <= 1e-8);
    }
    SUBCASE("N=2") {
        const Multipliers m = multiplier_oracle(SolitonParams::make({1.0, 2.0}, {0.0, 0.0}), g);
        CHECK(std::abs(m.mu[0] - 2.0) <= 1e-6);
        CHECK(std::abs(m.mu[1] - 3.0) <= 1e-6);
    }
    SUBCASE("N=3") {
        const Multipliers m = multiplier_oracle(SolitonParams::make({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}), g);
        const std::vector<double> want = {6.0, 11.0, 6.0};
        for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(m.mu[k] - want[k]) <= 1e-5);
    }
}

TEST_CASE("multiplier oracle on random speed tuples") {
    const Grid g = Grid::make(16384.0, 524288);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t N = 1 + static_cast<std::size_t>(trial % 3);
        const std::vector<double> c = random_speeds(rng, N);
        const Multipliers fit = multiplier_oracle(SolitonParams::make(c, std::vector<double>(N, 0.0)), g);
        const Multipliers want = vieta_multipliers(c);
        for (std::size_t k = 0; k < N; ++k) {
            CAPTURE(trial);
            CAPTURE(k);
            CHECK(std::abs(fit.mu[k] - want.mu[k]) <= 1e-5 * std::abs(want.mu[k]));
        }
    }
}

TEST_CASE("Hessian D for two solitons") {
    const HessianD h = hessian_D({1.0, 2.0});
    CHECK(std::abs(h.BtA(0, 0) - kPi) <= 1e-12);
    CHECK(std::abs(h.BtA(1, 1) + kPi) <= 1e-12);
    CHECK(std::abs(h.BtA(0, 1)) <= 1e-12);
    CHECK(std::abs(h.BtA(1, 0)) <= 1e-12);
    REQUIRE(h.eigenvalues.size() == 2);
    CHECK(std::abs(h.eigenvalues[0] - kPi * (-3.0 - std::sqrt(13.0)) / 2.0) <= 1e-10);
    CHECK(std::abs(h.eigenvalues[1] - kPi * (-3.0 + std::sqrt(13.0)) / 2.0) <= 1e-10);
    CHECK(h.positive == 1);
    CHECK(p_of_D({1.0, 2.0}) == 1);
    CHECK_THROWS_AS(hessian_D({1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("Hessian D structure for random speeds") {
    std::mt19937_64 rng(5);
    for (std::size_t N = 1; N <= 6; ++N)
        for (int trial = 0; trial < 4; ++trial) {
            const std::vector<double> c = random_speeds(rng, N);
            const HessianD h = hessian_D(c);
            const Eigen::MatrixXd BtDB = h.B.transpose() * h.D * h.B;
            const double scale = h.BtA.cwiseAbs().maxCoeff();
            // Forming D loses a factor cond(B) to roundoff.
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(h.B);
            const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
            CAPTURE(N);
            CAPTURE(cond);
            CHECK((BtDB - h.BtA).cwiseAbs().maxCoeff() <= 1e-13 * cond * scale);
            for (std::size_t j = 0; j < N; ++j)
                for (std::size_t k = 0; k < N; ++k) {
                    const double v = h.BtA(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                    if (j != k) CHECK(std::abs(v) <= 1e-12 * scale);
                    else CHECK((j % 2 == 0 ? v > 0.0 : v < 0.0));
                }
            CHECK(p_of_D(c) == static_cast<int>((N + 1) / 2));
        }
}

TEST_CASE("augmented Lagrangian") {
    const Grid g = Grid::make(128.0, 2048);
    const SolitonParams p = SolitonParams::make({1.0, 2.0}, {0.0, 0.0});
    const RealField U = nsoliton_tau(p, g);
    // The penalty vanishes when the reference values are those of U itself.
    const std::vector<double> ref = {recursion_functional(U, 1), recursion_functional(U, 2)};
    CHECK(augmented_lagrangian(U, p, 100.0, ref) ==
          doctest::Approx(lyapunov_S(U, p)).epsilon(1e-14));

    SUBCASE("U is a local minimum") {
        const double base = augmented_lagrangian(U, p, 100.0);
        const std::vector<RealField> modes = phase_derivatives(p, g);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> amp(1e-3, 1e-2);
        for (int k = 0; k < 20; ++k) {
            RealField eta = orthogonalize(band_limited_noise(g, rng, 2.0, 4.0), modes);
            eta = (amp(rng) / l2_norm(eta)) * eta;
            CAPTURE(k);
            CHECK(augmented_lagrangian(U + eta, p, 100.0) - base >= 0.0);
        }
    }

    SUBCASE("phase invariance") {
        const double a = augmented_lagrangian(U, p, 100.0);
        const SolitonParams q = SolitonParams::make({1.0, 2.0}, {-3.0, 4.0});
        const double b = augmented_lagrangian(nsoliton_tau(q, g), q, 100.0);
        CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
    }

    CHECK(default_penalty(p, g) > 0.0);
}
