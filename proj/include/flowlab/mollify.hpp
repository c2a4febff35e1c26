#pragma once

#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

/// Unnormalized kernel profile ((1 - |z|^2/eps^2)_+)^3.
double mollifier_profile(Vec2 z, double eps);

/// Grid-backed discrete convolution of X with the compact kernel, weights
/// normalized to sum to 1. Lattice points where X is not evaluable are
/// dropped and the remaining weights renormalized. Requires hx, hy <= eps/2.
VectorField mollify(const VectorField& X, double eps, const Grid2D& grid);

/// Node-sum approximation of the L1 distance of A and B over grid nodes at
/// least `margin` inside the box: sum |A - B| * hx * hy.
double l1_distance(const VectorField& A, const VectorField& B, const Grid2D& grid,
                   double margin = 0.0);

}  // namespace flowlab
