#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "bolab/field.hpp"
#include "bolab/parallel.hpp"
#include "bolab/solitons.hpp"

namespace bolab {

// Dense symmetric discretization. Bilinear forms carry the quadrature weight:
// <Mu, v> = h * v^T M u, so the eigenvalues of `matrix` are those of the operator.
struct OperatorMatrix {
    Grid grid;
    Eigen::MatrixXd matrix;
    std::string label;
    double asymmetry = 0.0;  // max |M - M^T| / max |M| before symmetrization

    double weight() const { return grid.spacing(); }
    RealField apply(const RealField& v) const;
    double quadratic_form(const RealField& z) const;
};

OperatorMatrix assemble_L1(double c, const Grid& g, Exec exec = Exec::parallel);

struct HessianOptions {
    bool probe_check = true;              // analytic orders vs finite differences
    bool finite_difference_only = false;  // skip the analytic fast paths
    std::uint64_t probe_seed = 20240601;
};

class ProbeCheckFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Matrix of sum_n coeffs[n-1] H_n''(base). Orders 1..4 are analytic; higher
// orders use central differences of the recursion gradient along each basis
// vector with one Richardson level.
OperatorMatrix assemble_hessian(const std::vector<double>& coeffs, const RealField& base,
                                Exec exec = Exec::parallel, const HessianOptions& opt = {});

// Analytic H_1'' .. H_4'' applied to v; coeffs beyond the fourth are rejected.
RealField apply_low_order_hessian(const std::vector<double>& coeffs, const RealField& base, const RealField& v);
// Central-difference Hessian-vector product of the recursion gradient.
RealField fd_hessian_vector(const std::vector<double>& coeffs, const RealField& base, const RealField& v);

// Coefficients of S_N'' over H_1'' .. H_{N+1}'': (mu_1, ..., mu_N, 1).
std::vector<double> lyapunov_coefficients(const std::vector<double>& speeds);

// L_n = H_{n+1}'' + c H_n'' at Q_c (n >= 1; L_1 coincides with assemble_L1).
OperatorMatrix assemble_Ln(int n, double c, const Grid& g, Exec exec = Exec::parallel,
                           const HessianOptions& opt = {});

OperatorMatrix assemble_LNj(const std::vector<double>& speeds, std::size_t j, const Grid& g,
                            Exec exec = Exec::parallel, const HessianOptions& opt = {});
OperatorMatrix assemble_LN(const SolitonParams& p, const Grid& g, Exec exec = Exec::parallel,
                           const HessianOptions& opt = {});

struct EigenPairs {
    std::vector<double> values;  // ascending
    Eigen::MatrixXd vectors;     // columns, Euclidean-normalized
};

EigenPairs lowest_eigenpairs(const OperatorMatrix& m, std::size_t count);
std::vector<double> all_eigenvalues(const OperatorMatrix& m);

struct Inertia {
    int negative = 0;
    int zero = 0;
    double zero_tol = 0.0;
    double first_excluded = 0.0;    // smallest |lambda| above zero_tol
    double kernel_magnitude = 0.0;  // calibration value (auto mode only)
    std::vector<double> lowest;     // eigenvalues inspected, ascending
};

class CalibrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Inertia inertia(const OperatorMatrix& m, double zero_tol);
// Auto mode: zero_tol = 10 max |eig(K^T M K)| for an orthonormal basis K of
// the known kernel.
Inertia inertia(const OperatorMatrix& m, const std::vector<RealField>& kernel);

// Kernels known in closed form.
std::vector<RealField> soliton_kernel(double c, const Grid& g);
std::vector<RealField> nsoliton_kernel(const SolitonParams& p, const Grid& g);

// |<a, b>| / (|a| |b|)
double correlation(const RealField& a, const RealField& b);

struct ScalingRow {
    std::vector<double> speeds;
    int k = 1;
    double nu = 0.0;          // k-th negative eigenvalue of the N-soliton Hessian
    double nu_single = 0.0;   // negative eigenvalue of L_{N,2k-1}
    double predicted = 0.0;   // -c_{2k-1} prod_{j != 2k-1} (c_j - c_{2k-1})
    double ratio = 0.0;
    double ratio_single = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    std::vector<double> mean_ratio;    // per k
    std::vector<double> spread;        // (max - min) / |mean| per k
    std::vector<double> spread_single;
};

class InertiaMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// phase_spread: the N-soliton Hessian is evaluated with phases evenly spread
// over [-phase_spread, phase_spread] (0 clusters them).
ScalingTable theorem13_scaling(const std::vector<std::vector<double>>& sweep, const Grid& g,
                               double phase_spread, Exec exec = Exec::parallel);

std::vector<double> spread_phases(std::size_t count, double spread);

}  // namespace bolab
