#pragma once

#include <string>

#include "flowlab/field.hpp"

namespace flowlab {

/// Reads a grid-sampled vector field from CSV with header `x,y,u,v`. Rows
/// may come in any order but must cover a uniform grid exactly once.
VectorField load_vector_csv(const std::string& path, std::string name = {});

/// Reads a grid-sampled scalar field from CSV with header `x,y,f`.
ScalarField load_scalar_csv(const std::string& path, std::string name = {});

/// Writes node samples row by row (y outer, x inner).
void write_vector_csv(const std::string& path, const VectorField& X, const Grid2D& grid);
void write_scalar_csv(const std::string& path, const ScalarField& f, const Grid2D& grid);

/// Shortest round-trip decimal form of v.
std::string format_double(double v);

}  // namespace flowlab
