#pragma once

// Finite-difference diffusion matrices standing in for the boundary-value,
// skyscraper and anisotropic-layer test problems. All use homogeneous
// Dirichlet boundaries and lexicographic ordering with x fastest.

#include "ekcg/core.hpp"

namespace ekcg::harness {

using Matrix = SparseSpdMatrix<double>;

/// 5-point Laplacian on an nx × ny grid.
Matrix gen_poisson2d(Index nx, Index ny);

/// 7-point Laplacian on an nx × ny × nz grid.
Matrix gen_poisson3d(Index nx, Index ny, Index nz);

/// Layered anisotropic diffusion: z-layer l has in-plane conductivity cycling
/// through {1, contrast, 1/contrast} (l mod 3) and unit conductivity across
/// layers.
Matrix gen_aniso3d(Index nx, Index ny, Index nz, double contrast);

/// Skyscraper coefficients: a cell whose scaled coordinates floor(10·x_d)
/// are all even gets 1 + (contrast − 1)·(floor(10·y) + 1), every other cell 1.
/// Face couplings use the arithmetic mean of the two cells, so isolated
/// high cells still raise the spectrum at coarse resolution. nz = 1 gives the
/// 2D problem.
Matrix gen_skyscraper(Index nx, Index ny, Index nz, double contrast);

}  // namespace ekcg::harness
