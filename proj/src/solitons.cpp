#include "bolab/solitons.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace bolab {

namespace {

using CMat = Eigen::MatrixXcd;
using lcplx = std::complex<long double>;

constexpr double kRefineCondition = 1e8;

struct LocalSolve {
    CMat x;
    double condition = 0.0;
    bool refined = false;
};

// Partial-pivoting solve with iterative refinement; the residual is
// accumulated in long double when the system is poorly conditioned.
LocalSolve solve_local(const CMat& a, const CMat& b) {
    Eigen::PartialPivLU<CMat> lu(a);
    LocalSolve out;
    const double rc = lu.rcond();
    out.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    out.x = lu.solve(b);
    if (out.condition > kRefineCondition) {
        out.refined = true;
        const auto n = a.rows();
        for (int sweep = 0; sweep < 3; ++sweep) {
            CMat r(n, b.cols());
            for (Eigen::Index c = 0; c < b.cols(); ++c)
                for (Eigen::Index i = 0; i < n; ++i) {
                    lcplx acc(b(i, c).real(), b(i, c).imag());
                    for (Eigen::Index k = 0; k < n; ++k)
                        acc -= lcplx(a(i, k).real(), a(i, k).imag()) *
                               lcplx(out.x(k, c).real(), out.x(k, c).imag());
                    r(i, c) = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
                }
            out.x += lu.solve(r);
        }
    }
    if (!out.x.allFinite()) throw std::runtime_error("singular local soliton system");
    return out;
}

CMat tau_matrix(const SolitonParams& p, double x) {
    const auto n = static_cast<Eigen::Index>(p.count());
    CMat f(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double cj = p.speeds[j];
            if (j == k)
                f(j, k) = cplx(x - cj * p.time - p.phases[j], 1.0 / cj);
            else
                f(j, k) = cplx(0.0, -2.0 / (cj - p.speeds[k]));
        }
    return f;
}

CMat scattering_matrix(const ScatteringData& s, double x) {
    const auto n = static_cast<Eigen::Index>(s.lambda.size());
    CMat a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            a(j, k) = j == k ? x + s.gamma[j] : cplx(0.0, 1.0 / (s.lambda[j] - s.lambda[k]));
    return a;
}

}  // namespace

SolitonParams SolitonParams::make(std::vector<double> speeds, std::vector<double> phases, double time) {
    SolitonParams p{std::move(speeds), std::move(phases), time};
    p.validate();
    return p;
}

void SolitonParams::validate() const {
    if (speeds.empty()) throw std::invalid_argument("at least one speed is required");
    if (phases.size() != speeds.size()) {
        std::ostringstream os;
        os << "expected " << speeds.size() << " phases, got " << phases.size();
        throw std::invalid_argument(os.str());
    }
    for (std::size_t j = 0; j < speeds.size(); ++j) {
        if (!std::isfinite(speeds[j]) || speeds[j] <= 0.0)
            throw std::invalid_argument("speeds must be finite and positive");
        if (!std::isfinite(phases[j])) throw std::invalid_argument("phases must be finite");
        if (j > 0 && !(speeds[j] > speeds[j - 1]))
            throw std::invalid_argument("speeds must be strictly increasing");
    }
    if (!std::isfinite(time)) throw std::invalid_argument("time must be finite");
}

ScatteringData scattering_data(const SolitonParams& p) {
    p.validate();
    ScatteringData s;
    for (std::size_t j = 0; j < p.count(); ++j) {
        const double lam = -0.5 * p.speeds[j];
        s.lambda.push_back(lam);
        s.gamma.push_back(cplx(-p.phases[j] - p.speeds[j] * p.time, -1.0 / (2.0 * lam)));
    }
    return s;
}

double soliton_profile(double c, double s) { return 2.0 * c / (c * c * s * s + 1.0); }

RealField one_soliton(double c, double x0, double t, const Grid& g) {
    if (!(c > 0.0)) throw std::invalid_argument("soliton speed must be positive");
    return sample(g, [&](double x) { return soliton_profile(c, x - c * t - x0); });
}

RealField nsoliton_tau(const SolitonParams& p, const Grid& g, TauSign sign, Exec exec) {
    p.validate();
    const std::size_t n = g.size();
    const auto N = static_cast<Eigen::Index>(p.count());
    std::vector<double> u(n);
    const double flip = sign == TauSign::positive ? -1.0 : 1.0;
    for_each_index(n, exec, [&](std::size_t i) {
        // d/dx ln det F = tr(F^{-1}) since dF/dx = I (Jacobi's formula).
        LocalSolve s = solve_local(tau_matrix(p, g.x(i)), CMat::Identity(N, N));
        const cplx tr = s.x.trace();
        // i d/dx ln(f*/f) = i (conj(tr) - tr) = 2 Im(tr)
        u[i] = flip * 2.0 * tr.imag();
    });
    return RealField(g, std::move(u));
}

ScatteringFields nsoliton_scattering(const SolitonParams& p, const Grid& g, Exec exec) {
    const ScatteringData sd = scattering_data(p);
    const std::size_t n = g.size();
    const std::size_t N = p.count();
    std::vector<std::vector<cplx>> phi(N, std::vector<cplx>(n));
    std::vector<double> cond(n);
    std::vector<char> refined(n);
    for_each_index(n, exec, [&](std::size_t i) {
        LocalSolve s = solve_local(scattering_matrix(sd, g.x(i)), CMat::Ones(static_cast<Eigen::Index>(N), 1));
        for (std::size_t j = 0; j < N; ++j) phi[j][i] = s.x(static_cast<Eigen::Index>(j), 0);
        cond[i] = s.condition;
        refined[i] = s.refined ? 1 : 0;
    });

    ScatteringFields out;
    std::vector<double> u(n, 0.0), ul(n, 0.0);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            u[i] -= std::norm(phi[j][i]) / sd.lambda[j];
            ul[i] -= 2.0 * phi[j][i].imag();
        }
    for (std::size_t j = 0; j < N; ++j) out.phi.emplace_back(g, std::move(phi[j]));
    out.u = RealField(g, std::move(u));
    out.u_linear = RealField(g, std::move(ul));
    out.max_condition = *std::max_element(cond.begin(), cond.end());
    out.refined_points = static_cast<std::size_t>(std::count(refined.begin(), refined.end(), 1));
    return out;
}

std::vector<RealField> phase_derivatives(const SolitonParams& p, const Grid& g, Exec exec) {
    const ScatteringData sd = scattering_data(p);
    const std::size_t n = g.size();
    const auto N = static_cast<Eigen::Index>(p.count());
    std::vector<std::vector<double>> du(p.count(), std::vector<double>(n));
    for_each_index(n, exec, [&](std::size_t i) {
        const CMat a = scattering_matrix(sd, g.x(i));
        LocalSolve s = solve_local(a, CMat::Ones(N, 1));
        // d(gamma_j)/d(x_j) = -1, so A dPhi = Phi_j e_j.
        CMat rhs = CMat::Zero(N, N);
        for (Eigen::Index j = 0; j < N; ++j) rhs(j, j) = s.x(j, 0);
        LocalSolve d = solve_local(a, rhs);
        for (Eigen::Index j = 0; j < N; ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < N; ++k)
                acc -= 2.0 * (std::conj(s.x(k, 0)) * d.x(k, j)).real() / sd.lambda[static_cast<std::size_t>(k)];
            du[static_cast<std::size_t>(j)][i] = acc;
        }
    });
    std::vector<RealField> out;
    for (auto& v : du) out.emplace_back(g, std::move(v));
    return out;
}

RealField dQ_dc(double c, const Grid& g, double x0) {
    if (!(c > 0.0)) throw std::invalid_argument("soliton speed must be positive");
    return sample(g, [&](double x) {
        const double s = c * c * (x - x0) * (x - x0);
        return 2.0 * (1.0 - s) / ((s + 1.0) * (s + 1.0));
    });
}

EigenCatalog eigen_catalog(const Grid& g) {
    using std::numbers::pi;
    const double s5 = std::sqrt(5.0);
    const double rpi = std::sqrt(pi);
    EigenCatalog cat;
    cat.grid = g;
    cat.lambda_minus = -(1.0 + s5) / 2.0;
    cat.lambda_plus = (s5 - 1.0) / 2.0;
    cat.norm_minus = (1.0 - s5) * std::sqrt(s5 - 2.0) / (4.0 * std::sqrt(s5 * pi));
    cat.norm_plus = (1.0 + s5) * std::sqrt(s5 + 2.0) / (4.0 * std::sqrt(s5 * pi));

    auto q = [](double x) { return 2.0 / (x * x + 1.0); };
    auto dq = [](double x) { return -4.0 * x / ((x * x + 1.0) * (x * x + 1.0)); };
    cat.eta0 = sample(g, [&](double x) { return dq(x) / rpi; });
    cat.eta_minus = sample(g, [&](double x) { return cat.norm_minus * (2.0 * q(x) + (1.0 + s5) * q(x) * q(x)); });
    cat.eta_plus = sample(g, [&](double x) { return cat.norm_plus * (2.0 * q(x) + (1.0 - s5) * q(x) * q(x)); });
    cat.eta_one = sample(g, [&](double x) { return (dq(x) + x * q(x)) / rpi; });
    return cat;
}

RealField EigenCatalog::generalized(double lambda) const {
    const double pref = std::sqrt(2.0 / std::numbers::pi);
    return sample(grid, [&](double x) {
        return pref * ((x * x - 1.0) * std::cos(lambda * x) + 2.0 * x * std::sin(lambda * x)) / (x * x + 1.0);
    });
}

}  // namespace bolab
