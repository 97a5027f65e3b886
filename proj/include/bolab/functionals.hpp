#pragma once

#include <functional>
#include <vector>

#include "bolab/field.hpp"
#include "bolab/parallel.hpp"
#include "bolab/solitons.hpp"

namespace bolab {

struct ConservedTower {
    std::vector<double> values;        // H_0 .. H_M
    std::vector<double> imag_residue;  // imaginary part before it is discarded (0 for H_0)
    bool flagged = false;              // some residue above 1e-8 (1 + |value|)
};

constexpr double kResidueThreshold = 1e-8;

ConservedTower conserved_tower(const RealField& u, int max_order);

// Real part of H_n from the Jost-density recursion (n >= 0).
double recursion_functional(const RealField& u, int n);

// L2 gradient of sum_n coeffs[n-1] * H_n computed by reverse-mode
// differentiation of the recursion. coeffs[0] multiplies H_1.
RealField recursion_gradient(const RealField& u, const std::vector<double>& coeffs);
RealField recursion_gradient(const RealField& u, int n);

// Closed forms for n <= 4 (no zero-mode term, unlike the periodic recursion).
double explicit_H(const RealField& u, int n);
RealField explicit_grad(const RealField& u, int n);

// Closed form where one exists (n <= 4), recursion otherwise.
double functional_value(const RealField& u, int n);
RealField functional_gradient(const RealField& u, int n);

// Coordinate-wise central differences of recursion_functional, one Richardson
// level, step 1e-5 (1 + |u|_inf).
RealField fd_gradient(const RealField& u, int n, Exec exec = Exec::parallel);

// Same scheme for an arbitrary functional. F must be safe to call concurrently.
RealField fd_gradient(const RealField& u, const std::function<double(const RealField&)>& F,
                      Exec exec = Exec::parallel);

// (-1)^(n+1) 2 sum_j c_j^(n-2) |phi_j|^2 at the N-soliton.
RealField multisoliton_gradient(const SolitonParams& p, int n, const Grid& g);
RealField multisoliton_gradient(const SolitonParams& p, int n, const ScatteringFields& s);

double trace_identity(const std::vector<double>& speeds, int n);
inline double trace_identity(const SolitonParams& p, int n) { return trace_identity(p.speeds, n); }

// <grad H_n, d/dx grad H_m> with the explicit gradients (n, m <= 4).
double poisson_bracket(const RealField& u, int n, int m);

}  // namespace bolab
