#pragma once

#include <Eigen/Dense>

#include <vector>

#include "bolab/field.hpp"
#include "bolab/solitons.hpp"

namespace bolab {

struct Multipliers {
    std::vector<double> mu;  // mu[0] is mu_1
};

// sigma_0 .. sigma_N of the given values (sigma_0 = 1).
std::vector<double> elementary_symmetric(const std::vector<double>& c);
// sigma_{j,0} .. sigma_{j,N-1}: symmetric functions of all values except c[j].
std::vector<double> partial_symmetric(const std::vector<double>& c, std::size_t j);

// mu_n = sigma_{N-n+1}(c)
Multipliers vieta_multipliers(const std::vector<double>& speeds);

// Which gradient fields enter the Euler-Lagrange residual: the squared
// eigenfunction formula at the N-soliton, or gradients of the functionals
// themselves evaluated on the sampled profile (closed forms up to H_4, the
// recursion beyond), which do not use the soliton formulas.
enum class GradientSource { squared_eigenfunctions, functional };

struct ElResidual {
    double residual = 0.0;      // |grad H_{N+1} + sum mu_n grad H_n| / largest term
    double absolute = 0.0;
    double largest_term = 0.0;
};

ElResidual el_residual_report(const SolitonParams& p, const Grid& g, const Multipliers& mu,
                              GradientSource source = GradientSource::squared_eigenfunctions);
double el_residual(const SolitonParams& p, const Grid& g,
                   GradientSource source = GradientSource::squared_eigenfunctions);
double el_residual(const SolitonParams& p, const Grid& g, const Multipliers& mu,
                   GradientSource source = GradientSource::squared_eigenfunctions);

// Least-squares multipliers from the functional gradients at U^(N).
Multipliers multiplier_oracle(const SolitonParams& p, const Grid& g);

struct HessianD {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd D;
    Eigen::MatrixXd BtA;
    Eigen::VectorXd eigenvalues;  // of (D + D^T)/2, ascending
    double asymmetry = 0.0;       // max |D - D^T|
    int positive = 0;
};

HessianD hessian_D(const std::vector<double>& speeds);
int p_of_D(const std::vector<double>& speeds);

// S_N(u) = H_{N+1}(u) + sum mu_n H_n(u)
double lyapunov_S(const RealField& u, const SolitonParams& p);
// S_N plus (C/2) sum_j (H_j(u) - ref_j)^2 with ref_j = reference[j-1].
double augmented_lagrangian(const RealField& u, const SolitonParams& p, double penalty,
                            const std::vector<double>& reference);
// Reference values from the trace identities.
double augmented_lagrangian(const RealField& u, const SolitonParams& p, double penalty);

// 10 times a symbol-based bound on |S_N''| for the grid.
double default_penalty(const SolitonParams& p, const Grid& g);

}  // namespace bolab
