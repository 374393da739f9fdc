#pragma once

#include <span>

#include "entropylab/grid_density.hpp"

// Analytic densities discretized with exact cell integrals.
namespace entropylab::gen {

/// Uniform density on the box prod_i [lo_i, hi_i); endpoints on the 2^-k grid.
GridDensity uniform(std::span<const double> lo, std::span<const double> hi, int k);
GridDensity uniform(double lo, double hi, int k);

/// Isotropic Gaussian N(mean, sigma^2 I) conditioned on [-N, N]^d.
GridDensity gaussian(std::span<const double> mean, double sigma, double half_width, int k);
GridDensity gaussian(double mean, double sigma, double half_width, int k);

/// Symmetric tent density on [lo, hi] (the law of the mean of two uniforms).
GridDensity triangular(double lo, double hi, int k);

/// Density (p + 1) x^p on [0, 1].
GridDensity power(double p, int k);

/// Product density f_1(x_1) ... f_d(x_d) of one-dimensional factors at a
/// common resolution.
GridDensity product(std::span<const GridDensity> factors);

}  // namespace entropylab::gen
