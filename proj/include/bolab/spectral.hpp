#pragma once

#include <functional>
#include <vector>

#include "bolab/field.hpp"

namespace bolab {

// Unnormalized in-place transforms; backward(forward(v)) == n * v.
void fft_forward(std::vector<cplx>& v);
void fft_backward(std::vector<cplx>& v);

std::vector<cplx> spectrum(const RealField& u);
std::vector<cplx> spectrum(const ComplexField& u);
// Inverse of spectrum(), including the 1/n normalization.
ComplexField from_spectrum(const Grid& g, std::vector<cplx> coeffs);
RealField real_from_spectrum(const Grid& g, std::vector<cplx> coeffs);

// Index k of the transform mapped to its signed frequency (fftfreq order, the
// Nyquist index maps to -n/2).
long signed_index(std::size_t k, std::size_t n);

// Multiplies by symbol(k) in frequency space, k being the transform index.
using Symbol = std::function<cplx(std::size_t)>;
RealField apply_symbol(const RealField& u, const Symbol& symbol);
ComplexField apply_symbol(const ComplexField& u, const Symbol& symbol);

RealField hilbert(const RealField& u);
ComplexField hilbert(const ComplexField& u);

ComplexField project_plus(const RealField& u);
ComplexField project_plus(const ComplexField& u);
ComplexField project_minus(const RealField& u);
ComplexField project_minus(const ComplexField& u);

RealField derivative(const RealField& u, int order = 1);
ComplexField derivative(const ComplexField& u, int order = 1);

double integrate(const RealField& u);
cplx integrate(const ComplexField& u);
double inner(const RealField& u, const RealField& v);
double l2_norm(const RealField& u);
double sobolev_norm(const RealField& u, double s);

// Keeps the modes with |k| <= fraction * n/2.
RealField lowpass(const RealField& u, double fraction);

// u(x) -> u(-x) on the periodic grid (index i -> n - i).
RealField reflect(const RealField& u);

}  // namespace bolab
