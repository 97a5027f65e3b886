#include "bolab/operators.hpp"

#include <lapacke.h>

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <sstream>

#include "bolab/functionals.hpp"
#include "bolab/random.hpp"
#include "bolab/spectral.hpp"
#include "bolab/variational.hpp"

namespace bolab {

namespace {

// Base-dependent pieces of H_2'' .. H_4'' computed once per assembly.
struct LowOrderHessian {
    std::vector<double> coeffs;  // up to four entries
    RealField u, ux, uxx, hu, hux, huxx, hu2, h_u_ux, u2;

    LowOrderHessian(std::vector<double> c, const RealField& base) : coeffs(std::move(c)), u(base) {
        if (coeffs.size() > 4) throw std::invalid_argument("analytic Hessians exist for orders 1..4 only");
        coeffs.resize(4, 0.0);
        ux = derivative(base, 1);
        uxx = derivative(ux, 1);
        hu = hilbert(base);
        hux = hilbert(ux);
        huxx = hilbert(uxx);
        u2 = times(base, base);
        hu2 = hilbert(u2);
        h_u_ux = hilbert(times(base, ux));
    }

    bool empty() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](double a) { return a == 0.0; });
    }

    RealField apply(const RealField& v) const {
        const std::size_t n = v.size();
        RealField out(v.grid());
        if (coeffs[0] != 0.0)
            for (std::size_t i = 0; i < n; ++i) out[i] += coeffs[0] * v[i];
        if (coeffs[1] == 0.0 && coeffs[2] == 0.0 && coeffs[3] == 0.0) return out;
        const RealField vx = derivative(v, 1);
        const RealField hvx = hilbert(vx);
        if (coeffs[1] != 0.0)
            for (std::size_t i = 0; i < n; ++i) out[i] += coeffs[1] * (-hvx[i] - 2.0 * u[i] * v[i]);
        if (coeffs[2] == 0.0 && coeffs[3] == 0.0) return out;
        const RealField vxx = derivative(vx, 1);
        const RealField uv = times(u, v);
        const RealField huvx = hilbert(derivative(uv, 1));
        if (coeffs[2] != 0.0) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] += coeffs[2] * (-(4.0 / 3.0) * vxx[i] + 2.0 * v[i] * hux[i] + 2.0 * u[i] * hvx[i] +
                                       2.0 * huvx[i] + 4.0 * u[i] * u[i] * v[i]);
        }
        if (coeffs[3] != 0.0) {
            const RealField hv = hilbert(v);
            const RealField hvxx = hilbert(vxx);
            const RealField hvxxx = hilbert(derivative(vxx, 1));
            const RealField h_v_huxx = hilbert(times(v, huxx));
            const RealField h_u_hvxx = hilbert(times(u, hvxx));
            RealField mix = times(v, hu);
            mix += times(u, hv);
            const RealField h_mix_xx = hilbert(derivative(mix, 2));
            const RealField hu2vx = hilbert(derivative(times(u2, v), 1));
            const RealField uv_xx = derivative(derivative(uv, 1), 1);
            const RealField huv = hilbert(uv);
            RealField w = times(v, hu2);
            w += 2.0 * times(u, huv);
            const RealField wx = derivative(w, 1);
            RealField s = times(v, ux);
            s += times(u, vx);
            const RealField hs = hilbert(s);
            for (std::size_t i = 0; i < n; ++i) {
                const double a = u[i], b = v[i];
                const double term = 2.0 * hvxxx[i] + 2.0 * (b * uxx[i] + a * vxx[i]) + 2.0 * uv_xx[i] +
                                    2.0 * (hv[i] * huxx[i] + hu[i] * hvxx[i] - h_v_huxx[i] - h_u_hvxx[i] - h_mix_xx[i]) -
                                    8.0 * a * b * hux[i] - 4.0 * a * a * hvx[i] - 4.0 * hu2vx[i] - 8.0 * a * a * a * b +
                                    vx[i] * hu2[i] + 2.0 * ux[i] * huv[i] - wx[i] - 2.0 * b * h_u_ux[i] - 2.0 * a * hs[i];
                out[i] += coeffs[3] * term;
            }
        }
        return out;
    }
};

double fd_step(const RealField& base) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + max_abs(base));
}

using GradientFn = std::function<RealField(const RealField&)>;

// Richardson-extrapolated central difference of a gradient along v.
RealField gradient_difference(const GradientFn& grad, const RealField& base, const RealField& v, double eps) {
    auto central = [&](double e) {
        RealField up = base, dn = base;
        for (std::size_t i = 0; i < base.size(); ++i) {
            up[i] += e * v[i];
            dn[i] -= e * v[i];
        }
        RealField d = grad(up);
        d -= grad(dn);
        d *= 1.0 / (2.0 * e);
        return d;
    };
    RealField fine = central(0.5 * eps);
    RealField coarse = central(eps);
    RealField out(base.grid());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

// Order 4 has a closed form; from order 5 on the recursion is the only source.
GradientFn high_order_gradient_fn(const std::vector<double>& coeffs) {
    return [coeffs](const RealField& w) {
        RealField out(w.grid());
        std::vector<double> rest = coeffs;
        if (rest.size() >= 4 && rest[3] != 0.0) {
            out += rest[3] * explicit_grad(w, 4);
            rest[3] = 0.0;
        }
        if (std::any_of(rest.begin(), rest.end(), [](double a) { return a != 0.0; })) out += recursion_gradient(w, rest);
        return out;
    };
}

// Explicit gradients for orders 1..4. The recursion carries the periodic
// zero-mode bias (O(1/L)), which would mask formula errors in the probe test.
GradientFn explicit_gradient_fn(const std::vector<double>& coeffs) {
    return [coeffs](const RealField& w) {
        RealField out(w.grid());
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            if (coeffs[k] != 0.0) out += coeffs[k] * explicit_grad(w, static_cast<int>(k) + 1);
        return out;
    };
}

void symmetrize(OperatorMatrix& m) {
    const double scale = m.matrix.cwiseAbs().maxCoeff();
    const double asym = (m.matrix - m.matrix.transpose()).cwiseAbs().maxCoeff();
    m.asymmetry = scale > 0.0 ? asym / scale : 0.0;
    m.matrix = 0.5 * (m.matrix + m.matrix.transpose()).eval();
}

RealField unit_vector(const Grid& g, std::size_t j) {
    RealField e(g);
    e[j] = 1.0;
    return e;
}

double norm_of(const RealField& v) { return std::sqrt(inner(v, v)); }

}  // namespace

RealField OperatorMatrix::apply(const RealField& v) const {
    require_same_grid(grid, v.grid());
    Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    Eigen::VectorXd y = matrix * x;
    return RealField(grid, std::vector<double>(y.data(), y.data() + y.size()));
}

double OperatorMatrix::quadratic_form(const RealField& z) const { return inner(apply(z), z); }

OperatorMatrix assemble_L1(double c, const Grid& g, Exec exec) {
    if (!(c > 0.0)) throw std::invalid_argument("soliton speed must be positive");
    const RealField q = one_soliton(c, 0.0, 0.0, g);
    const auto n = static_cast<Eigen::Index>(g.size());
    OperatorMatrix m{g, Eigen::MatrixXd(n, n), "L1(c=" + std::to_string(c) + ")", 0.0};
    for_each_index(g.size(), exec, [&](std::size_t j) {
        const RealField e = unit_vector(g, j);
        const RealField hex = hilbert(derivative(e, 1));
        for (std::size_t i = 0; i < g.size(); ++i)
            m.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -hex[i] + (c - 2.0 * q[i]) * e[i];
    });
    symmetrize(m);
    return m;
}

RealField apply_low_order_hessian(const std::vector<double>& coeffs, const RealField& base, const RealField& v) {
    return LowOrderHessian(coeffs, base).apply(v);
}

RealField fd_hessian_vector(const std::vector<double>& coeffs, const RealField& base, const RealField& v) {
    const double vmax = max_abs(v);
    if (vmax == 0.0) return RealField(v.grid());
    RealField d = gradient_difference(high_order_gradient_fn(coeffs), base, (1.0 / vmax) * v, fd_step(base));
    d *= vmax;
    return d;
}

OperatorMatrix assemble_hessian(const std::vector<double>& coeffs, const RealField& base, Exec exec,
                                const HessianOptions& opt) {
    if (coeffs.empty()) throw std::invalid_argument("at least one Hessian coefficient is required");
    const Grid& g = base.grid();
    const auto n = static_cast<Eigen::Index>(g.size());

    std::vector<double> low, high = coeffs;
    if (!opt.finite_difference_only) {
        low.assign(coeffs.begin(), coeffs.begin() + static_cast<long>(std::min<std::size_t>(4, coeffs.size())));
        for (std::size_t k = 0; k < std::min<std::size_t>(4, high.size()); ++k) high[k] = 0.0;
    }
    const bool use_fd = std::any_of(high.begin(), high.end(), [](double a) { return a != 0.0; });
    const LowOrderHessian analytic(low, base);
    const double eps = fd_step(base);
    const GradientFn high_grad = high_order_gradient_fn(high);

    std::ostringstream label;
    label << "hessian(";
    for (std::size_t k = 0; k < coeffs.size(); ++k) label << (k ? "," : "") << coeffs[k];
    label << ")";
    OperatorMatrix m{g, Eigen::MatrixXd::Zero(n, n), label.str(), 0.0};

    for_each_index(g.size(), exec, [&](std::size_t j) {
        const RealField e = unit_vector(g, j);
        RealField col = analytic.apply(e);
        if (use_fd) col += gradient_difference(high_grad, base, e, eps);
        for (std::size_t i = 0; i < g.size(); ++i) m.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    });
    symmetrize(m);

    if (opt.probe_check && !analytic.empty()) {
        std::mt19937_64 rng(opt.probe_seed);
        for (int probe = 0; probe < 5; ++probe) {
            const RealField v = band_limited_noise(g, rng, 2.0, g.half_length() / 8.0);
            RealField vm = v;
            const double mean = integrate(v) / (2.0 * g.half_length());
            for (auto& a : vm) a -= mean;
            const RealField a = analytic.apply(vm);
            const RealField f = gradient_difference(explicit_gradient_fn(analytic.coeffs), base, vm, fd_step(base));
            const double rel = norm_of(a - f) / std::max(norm_of(f), 1e-300);
            if (!(rel <= 1e-4)) {
                std::ostringstream os;
                os << "analytic Hessian disagrees with finite differences on probe " << probe << " (rel " << rel << ")";
                throw ProbeCheckFailure(os.str());
            }
        }
    }
    return m;
}

std::vector<double> lyapunov_coefficients(const std::vector<double>& speeds) {
    std::vector<double> c = vieta_multipliers(speeds).mu;
    c.push_back(1.0);
    return c;
}

OperatorMatrix assemble_Ln(int n, double c, const Grid& g, Exec exec, const HessianOptions& opt) {
    if (n < 1) throw std::invalid_argument("L_n needs n >= 1");
    if (!(c > 0.0)) throw std::invalid_argument("soliton speed must be positive");
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
    coeffs[static_cast<std::size_t>(n) - 1] = c;
    coeffs[static_cast<std::size_t>(n)] = 1.0;
    OperatorMatrix m = assemble_hessian(coeffs, one_soliton(c, 0.0, 0.0, g), exec, opt);
    m.label = "L_" + std::to_string(n);
    return m;
}

OperatorMatrix assemble_LNj(const std::vector<double>& speeds, std::size_t j, const Grid& g, Exec exec,
                            const HessianOptions& opt) {
    if (j >= speeds.size()) throw std::invalid_argument("soliton index out of range");
    const std::size_t N = speeds.size();
    const double cj = speeds[j];
    const auto sig = partial_symmetric(speeds, j);
    // sum_{n=1..N} sigma_{j,N-n} (H_{n+1}'' + c_j H_n'')
    std::vector<double> coeffs(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        coeffs[n] += sig[N - n];
        coeffs[n - 1] += cj * sig[N - n];
    }
    OperatorMatrix m = assemble_hessian(coeffs, one_soliton(cj, 0.0, 0.0, g), exec, opt);
    m.label = "L_{" + std::to_string(N) + "," + std::to_string(j + 1) + "}";
    return m;
}

OperatorMatrix assemble_LN(const SolitonParams& p, const Grid& g, Exec exec, const HessianOptions& opt) {
    OperatorMatrix m = assemble_hessian(lyapunov_coefficients(p.speeds), nsoliton_tau(p, g, TauSign::positive, exec), exec, opt);
    m.label = "S_" + std::to_string(p.count()) + "''";
    return m;
}

namespace {

// Householder tridiagonalization is done by Eigen. The tridiagonal problem goes
// to LAPACK bisection and inverse iteration, which only need level-1 BLAS. Some
// OpenBLAS builds return wrong level-3 results on AVX-512 machines, and the
// blocked dense drivers (dsyevr, dsyevd) depend on exactly those kernels.
class TridiagonalSpectrum {
public:
    explicit TridiagonalSpectrum(const Eigen::MatrixXd& a)
        : tri_(a), d_(tri_.diagonal()), e_(tri_.subDiagonal()) {}

    lapack_int size() const { return static_cast<lapack_int>(d_.size()); }

    // Lowest `count` eigenvalues, ascending, with LAPACK block bookkeeping.
    struct Lowest {
        std::vector<double> w;
        std::vector<lapack_int> iblock, isplit;
    };
    Lowest lowest(std::size_t count) const {
        const lapack_int n = size();
        Lowest r;
        r.w.resize(static_cast<std::size_t>(n));
        r.iblock.resize(static_cast<std::size_t>(n));
        r.isplit.resize(static_cast<std::size_t>(n));
        lapack_int found = 0, nsplit = 0;
        const lapack_int info = LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, 1, static_cast<lapack_int>(count), 0.0, d_.data(),
                                               e_.data(), &found, &nsplit, r.w.data(), r.iblock.data(), r.isplit.data());
        if (info != 0) throw std::runtime_error("dstebz failed with info " + std::to_string(info));
        r.w.resize(static_cast<std::size_t>(found));
        r.iblock.resize(static_cast<std::size_t>(found));
        return r;
    }

    std::vector<double> lowest_values(std::size_t count) const {
        auto w = lowest(count).w;
        std::sort(w.begin(), w.end());
        return w;
    }

    EigenPairs lowest_pairs(std::size_t count) const {
        const lapack_int n = size();
        const Lowest low = lowest(count);
        const auto m = static_cast<lapack_int>(low.w.size());
        Eigen::MatrixXd z(n, m);
        std::vector<lapack_int> ifail(static_cast<std::size_t>(m));
        const lapack_int info = LAPACKE_dstein(LAPACK_COL_MAJOR, n, d_.data(), e_.data(), m, low.w.data(),
                                               low.iblock.data(), low.isplit.data(), z.data(), n, ifail.data());
        if (info != 0) throw std::runtime_error("dstein failed with info " + std::to_string(info));
        const Eigen::MatrixXd v = tri_.matrixQ() * z;

        std::vector<std::size_t> order(low.w.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return low.w[a] < low.w[b]; });
        EigenPairs out;
        out.vectors.resize(n, m);
        for (std::size_t k = 0; k < order.size(); ++k) {
            out.values.push_back(low.w[order[k]]);
            out.vectors.col(static_cast<Eigen::Index>(k)) = v.col(static_cast<Eigen::Index>(order[k]));
        }
        return out;
    }

private:
    Eigen::Tridiagonalization<Eigen::MatrixXd> tri_;
    Eigen::VectorXd d_, e_;
};

}  // namespace

EigenPairs lowest_eigenpairs(const OperatorMatrix& m, std::size_t count) {
    count = std::min<std::size_t>(count, static_cast<std::size_t>(m.matrix.rows()));
    EigenPairs out = TridiagonalSpectrum(m.matrix).lowest_pairs(count);
    // Cheap guard against a broken linear algebra stack.
    const double scale = std::max(1.0, m.matrix.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
        const auto v = out.vectors.col(k);
        const double res = (m.matrix * v - out.values[static_cast<std::size_t>(k)] * v).norm();
        if (!(res <= 1e-8 * scale * static_cast<double>(m.matrix.rows())))
            throw std::runtime_error("eigenvector residual " + std::to_string(res) + " is too large");
    }
    return out;
}

std::vector<double> all_eigenvalues(const OperatorMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigenvalue solver did not converge");
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

Inertia inertia(const OperatorMatrix& m, double zero_tol) {
    if (!(zero_tol >= 0.0)) throw std::invalid_argument("zero tolerance must be non-negative");
    const auto n = static_cast<std::size_t>(m.matrix.rows());
    const TridiagonalSpectrum spectrum(m.matrix);
    std::size_t k = std::min<std::size_t>(n, 24);
    Inertia r;
    r.zero_tol = zero_tol;
    for (;;) {
        r.lowest = spectrum.lowest_values(k);
        if (r.lowest.back() > zero_tol || k == n) break;
        k = std::min(n, 2 * k);
    }
    r.first_excluded = std::numeric_limits<double>::infinity();
    for (double v : r.lowest) {
        if (v < -zero_tol) ++r.negative;
        else if (std::abs(v) <= zero_tol) ++r.zero;
        if (std::abs(v) > zero_tol) r.first_excluded = std::min(r.first_excluded, std::abs(v));
    }
    return r;
}

Inertia inertia(const OperatorMatrix& m, const std::vector<RealField>& kernel) {
    if (kernel.empty()) throw std::invalid_argument("auto tolerance needs a kernel basis");
    const auto n = m.matrix.rows();
    const auto d = static_cast<Eigen::Index>(kernel.size());
    Eigen::MatrixXd k(n, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        require_same_grid(m.grid, kernel[static_cast<std::size_t>(c)].grid());
        for (Eigen::Index i = 0; i < n; ++i) k(i, c) = kernel[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
    const Eigen::MatrixXd proj = q.transpose() * m.matrix * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (proj + proj.transpose()));
    const double magnitude = es.eigenvalues().cwiseAbs().maxCoeff();

    Inertia r = inertia(m, 10.0 * magnitude);
    r.kernel_magnitude = magnitude;
    int near = 0;
    for (double v : r.lowest)
        if (std::abs(v) <= 100.0 * magnitude) ++near;
    if (near < d) {
        std::ostringstream os;
        os << "only " << near << " eigenvalues within 100x of the kernel scale " << magnitude << " for a kernel of dimension "
           << d;
        throw CalibrationFailure(os.str());
    }
    return r;
}

std::vector<RealField> soliton_kernel(double c, const Grid& g) {
    return {sample(g, [c](double x) {
        const double s = c * c * x * x + 1.0;
        return -4.0 * c * c * c * x / (s * s);
    })};
}

std::vector<RealField> nsoliton_kernel(const SolitonParams& p, const Grid& g) { return phase_derivatives(p, g); }

double correlation(const RealField& a, const RealField& b) {
    return std::abs(inner(a, b)) / (norm_of(a) * norm_of(b));
}

std::vector<double> spread_phases(std::size_t count, double spread) {
    std::vector<double> x(count, 0.0);
    if (count < 2) return x;
    for (std::size_t j = 0; j < count; ++j)
        x[j] = -spread + 2.0 * spread * static_cast<double>(j) / static_cast<double>(count - 1);
    return x;
}

ScalingTable theorem13_scaling(const std::vector<std::vector<double>>& sweep, const Grid& g, double phase_spread,
                               Exec exec) {
    ScalingTable table;
    std::size_t kmax = 0;
    for (const auto& speeds : sweep) {
        const SolitonParams p = SolitonParams::make(speeds, spread_phases(speeds.size(), phase_spread));
        const int N = static_cast<int>(speeds.size());
        const int expected = (N + 1) / 2;
        const Inertia in = inertia(assemble_LN(p, g, exec), nsoliton_kernel(p, g));
        if (in.negative != expected) {
            std::ostringstream os;
            os << "expected " << expected << " negative eigenvalues, found " << in.negative;
            throw InertiaMismatch(os.str());
        }
        std::vector<double> negatives(in.lowest.begin(), in.lowest.begin() + in.negative);

        std::vector<ScalingRow> rows;
        for (int k = 1; k <= expected; ++k) {
            const std::size_t j = static_cast<std::size_t>(2 * k - 2);
            ScalingRow row;
            row.speeds = speeds;
            row.k = k;
            double prod = 1.0;
            for (std::size_t l = 0; l < speeds.size(); ++l)
                if (l != j) prod *= speeds[l] - speeds[j];
            row.predicted = -speeds[j] * prod;
            const Inertia single = inertia(assemble_LNj(speeds, j, g, exec), soliton_kernel(speeds[j], g));
            if (single.negative != 1) throw InertiaMismatch("L_{N,2k-1} must have exactly one negative eigenvalue");
            row.nu_single = single.lowest.front();
            row.ratio_single = row.nu_single / row.predicted;
            rows.push_back(row);
        }
        // Match the negative eigenvalues to k by ordering the predictions.
        std::vector<std::size_t> order(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rows[a].nu_single < rows[b].nu_single; });
        for (std::size_t i = 0; i < order.size(); ++i) {
            ScalingRow& row = rows[order[i]];
            row.nu = negatives[i];
            row.ratio = row.nu / row.predicted;
        }
        kmax = std::max(kmax, rows.size());
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    for (std::size_t k = 1; k <= kmax; ++k) {
        double lo = 1e300, hi = -1e300, sum = 0.0, lo_s = 1e300, hi_s = -1e300, sum_s = 0.0;
        int count = 0;
        for (const auto& r : table.rows) {
            if (r.k != static_cast<int>(k)) continue;
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
            sum += r.ratio;
            lo_s = std::min(lo_s, r.ratio_single);
            hi_s = std::max(hi_s, r.ratio_single);
            sum_s += r.ratio_single;
            ++count;
        }
        const double mean = sum / count;
        table.mean_ratio.push_back(mean);
        table.spread.push_back((hi - lo) / std::abs(mean));
        table.spread_single.push_back((hi_s - lo_s) / std::abs(sum_s / count));
    }
    return table;
}

}  // namespace bolab
