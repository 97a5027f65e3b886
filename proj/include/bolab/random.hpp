#pragma once

#include <random>

#include "bolab/field.hpp"

namespace bolab {

// Smooth pseudo-random real field: Gaussian Fourier coefficients with a
// Gaussian envelope of width xi_cut, zero mean, optionally multiplied by the
// window exp(-x^2 / (2 w^2)) when window_width > 0. Max |value| is 1.
RealField band_limited_noise(const Grid& g, std::mt19937_64& rng, double xi_cut, double window_width = 0.0);

// Keeps the part of u that is odd about x = 0 on the grid.
RealField odd_part(const RealField& u);

}  // namespace bolab
