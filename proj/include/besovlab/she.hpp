#pragma once

#include <cstdint>

#include "besovlab/grid.hpp"
#include "besovlab/process.hpp"
#include "besovlab/sampling.hpp"

namespace besovlab {

// Explicit Euler / centered differences on [0,1] with Neumann boundaries via
// mirror ghost cells; d independent space-time white noise fields, each cell
// increment N(0, dt/dx).  Internal sub-stepping keeps dt <= dx^2/4; the
// recorded series is u(t, x_probe) on the requested grid, with x_probe
// snapped to the nearest spatial node (the snapped value is stored back into
// the returned descriptor).
SamplePath solve_she(const ProcessDescriptor& desc, const GridSpec& grid, std::uint64_t seed,
                     std::uint64_t replicate = 0);

// Numeric screen of the built-in coefficient families on a sample grid of
// state values: bounded, and sigma uniformly elliptic.
void check_she_coefficients(const SheSpec& spec);

// Deterministic oracle for the linear case (sigma = identity, b = 0):
// Var u(t,x) from the Neumann cosine expansion of the heat kernel,
// t + sum_{n>=1} 2 cos^2(n pi x) (1 - e^{-2 n^2 pi^2 t}) / (2 n^2 pi^2).
double she_linear_variance(double t, double x, int n_modes = 4096);

}  // namespace besovlab
