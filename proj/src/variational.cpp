#include "bolab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bolab/functionals.hpp"
#include "bolab/spectral.hpp"

namespace bolab {

namespace {

void require_distinct_positive(const std::vector<double>& c) {
    if (c.empty()) throw std::invalid_argument("at least one speed is required");
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (!(c[j] > 0.0) || !std::isfinite(c[j])) throw std::invalid_argument("speeds must be finite and positive");
        for (std::size_t k = 0; k < j; ++k)
            if (c[j] == c[k]) throw std::invalid_argument("repeated speeds make B singular");
    }
}

std::vector<RealField> gradient_fields(const SolitonParams& p, const Grid& g, GradientSource source) {
    const int N = static_cast<int>(p.count());
    std::vector<RealField> out;
    if (source == GradientSource::squared_eigenfunctions) {
        const ScatteringFields s = nsoliton_scattering(p, g);
        for (int n = 1; n <= N + 1; ++n) out.push_back(multisoliton_gradient(p, n, s));
    } else {
        const RealField u = nsoliton_tau(p, g);
        for (int n = 1; n <= N + 1; ++n) out.push_back(functional_gradient(u, n));
    }
    return out;
}

}  // namespace

std::vector<double> elementary_symmetric(const std::vector<double>& c) {
    // Coefficients of prod (1 + c_j z).
    std::vector<double> s(c.size() + 1, 0.0);
    s[0] = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t k = j + 1; k >= 1; --k) s[k] += c[j] * s[k - 1];
    return s;
}

std::vector<double> partial_symmetric(const std::vector<double>& c, std::size_t j) {
    std::vector<double> rest;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (k != j) rest.push_back(c[k]);
    return elementary_symmetric(rest);
}

Multipliers vieta_multipliers(const std::vector<double>& speeds) {
    require_distinct_positive(speeds);
    const auto s = elementary_symmetric(speeds);
    const std::size_t N = speeds.size();
    Multipliers m;
    for (std::size_t n = 1; n <= N; ++n) m.mu.push_back(s[N - n + 1]);
    return m;
}

ElResidual el_residual_report(const SolitonParams& p, const Grid& g, const Multipliers& mu, GradientSource source) {
    const std::size_t N = p.count();
    if (mu.mu.size() != N) throw std::invalid_argument("multiplier count must equal soliton count");
    const auto grads = gradient_fields(p, g, source);
    RealField sum = grads[N];
    ElResidual r;
    r.largest_term = l2_norm(grads[N]);
    for (std::size_t n = 0; n < N; ++n) {
        RealField term = mu.mu[n] * grads[n];
        r.largest_term = std::max(r.largest_term, l2_norm(term));
        sum += term;
    }
    r.absolute = l2_norm(sum);
    r.residual = r.absolute / r.largest_term;
    return r;
}

double el_residual(const SolitonParams& p, const Grid& g, const Multipliers& mu, GradientSource source) {
    return el_residual_report(p, g, mu, source).residual;
}

double el_residual(const SolitonParams& p, const Grid& g, GradientSource source) {
    return el_residual(p, g, vieta_multipliers(p.speeds), source);
}

Multipliers multiplier_oracle(const SolitonParams& p, const Grid& g) {
    const auto N = static_cast<Eigen::Index>(p.count());
    const auto grads = gradient_fields(p, g, GradientSource::functional);
    const double h = g.spacing();
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd G(n, N);
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < N; ++k) G(i, k) = grads[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        target(i) = -grads[static_cast<std::size_t>(N)][static_cast<std::size_t>(i)];
    }
    // Normal equations with column scaling so the rank test is scale free.
    Eigen::VectorXd scale = G.colwise().norm().transpose();
    for (Eigen::Index k = 0; k < N; ++k) G.col(k) /= scale(k);
    const Eigen::MatrixXd gram = h * G.transpose() * G;
    const Eigen::VectorXd rhs = h * G.transpose() * target;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * hi)) throw std::runtime_error("multiplier Gram matrix is rank deficient");
    const Eigen::VectorXd x = gram.ldlt().solve(rhs);
    Multipliers m;
    for (Eigen::Index k = 0; k < N; ++k) m.mu.push_back(x(k) / scale(k));
    return m;
}

HessianD hessian_D(const std::vector<double>& speeds) {
    require_distinct_positive(speeds);
    const auto N = static_cast<Eigen::Index>(speeds.size());
    HessianD r;
    r.A.resize(N, N);
    r.B.resize(N, N);
    for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index k = 0; k < N; ++k)
            r.A(j, k) = std::numbers::pi * ((j % 2 == 0) ? 1.0 : -1.0) * std::pow(speeds[static_cast<std::size_t>(k)], static_cast<double>(j));
    // b_jk = d sigma_{N-j+1} / d c_k = sigma_{N-j} of the speeds without c_k (1-based j).
    for (Eigen::Index k = 0; k < N; ++k) {
        const auto part = partial_symmetric(speeds, static_cast<std::size_t>(k));
        for (Eigen::Index j = 0; j < N; ++j) r.B(j, k) = part[static_cast<std::size_t>(N - 1 - j)];
    }
    r.D = r.B.transpose().partialPivLu().solve(r.A.transpose()).transpose();
    r.BtA = r.B.transpose() * r.A;
    r.asymmetry = (r.D - r.D.transpose()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd sym = 0.5 * (r.D + r.D.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    r.eigenvalues = es.eigenvalues();
    const double tol = 1e-10 * sym.norm();
    r.positive = static_cast<int>((r.eigenvalues.array() > tol).count());
    return r;
}

int p_of_D(const std::vector<double>& speeds) { return hessian_D(speeds).positive; }

double lyapunov_S(const RealField& u, const SolitonParams& p) {
    const int N = static_cast<int>(p.count());
    const auto mu = vieta_multipliers(p.speeds);
    const ConservedTower t = conserved_tower(u, N + 1);
    double s = t.values[static_cast<std::size_t>(N + 1)];
    for (int n = 1; n <= N; ++n) s += mu.mu[static_cast<std::size_t>(n - 1)] * t.values[static_cast<std::size_t>(n)];
    return s;
}

double augmented_lagrangian(const RealField& u, const SolitonParams& p, double penalty,
                            const std::vector<double>& reference) {
    if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
    const int N = static_cast<int>(p.count());
    if (reference.size() != p.count()) throw std::invalid_argument("one reference value per speed is required");
    const auto mu = vieta_multipliers(p.speeds);
    const ConservedTower t = conserved_tower(u, N + 1);
    double s = t.values[static_cast<std::size_t>(N + 1)];
    double pen = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double hn = t.values[static_cast<std::size_t>(n)];
        s += mu.mu[static_cast<std::size_t>(n - 1)] * hn;
        const double d = hn - reference[static_cast<std::size_t>(n - 1)];
        pen += d * d;
    }
    return s + 0.5 * penalty * pen;
}

double augmented_lagrangian(const RealField& u, const SolitonParams& p, double penalty) {
    std::vector<double> ref;
    for (int n = 1; n <= static_cast<int>(p.count()); ++n) ref.push_back(trace_identity(p, n));
    return augmented_lagrangian(u, p, penalty, ref);
}

double default_penalty(const SolitonParams& p, const Grid& g) {
    // H_n'' behaves like (2^(n-1)/n) |xi|^(n-1) at high frequency; the potential
    // terms are folded in by widening the frequency by 2 |U|_inf.
    const int N = static_cast<int>(p.count());
    const auto mu = vieta_multipliers(p.speeds);
    const double umax = 2.0 * p.speeds.back();
    const double xi = std::numbers::pi * static_cast<double>(g.size() / 2) / g.half_length() + 2.0 * umax;
    auto bound = [&](int n) { return std::ldexp(1.0, n - 1) / n * std::pow(xi, n - 1); };
    double est = bound(N + 1);
    for (int n = 1; n <= N; ++n) est += mu.mu[static_cast<std::size_t>(n - 1)] * bound(n);
    return 10.0 * est;
}

}  // namespace bolab
