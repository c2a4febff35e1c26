#pragma once

#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

/// Default finite-difference step: 1e-4 times the domain diameter.
double default_fd_step(const Box& domain);

/// Finite-difference step used when none is given: default_fd_step of the
/// field's domain, or 1e-4 for unbounded fields.
double fd_step(const VectorField& X);

/// Analytic divergence when one is attached, otherwise central differences
/// with step h, switching to one-sided differences within h of the domain
/// edge. Throws DomainError outside the domain.
double divergence(const VectorField& X, Point2 p, double h);

/// As above with step fd_step(X).
double divergence(const VectorField& X, Point2 p);

/// Central-difference divergence, ignoring any attached analytic form.
double divergence_fd(const VectorField& X, Point2 p, double h);

/// Central-difference Jacobian; entry (i, j) is d(component i)/d(coordinate j).
Mat2 jacobian_fd(const VectorField& X, Point2 p, double h);

/// X(p) . perp(Y(p)), the planar wedge of X and Y.
double scalar_invariant(const VectorField& X, const VectorField& Y, Point2 p);

/// The wedge X . perp(Y) as a closed-form scalar field.
ScalarField wedge_field(const VectorField& X, const VectorField& Y);

/// Max of |divergence_fd(X, p, h)| over nodes at least `margin` inside the
/// grid box. Used to audit declared divergence-free fields.
double max_divergence_fd(const VectorField& X, const Grid2D& grid, double h, double margin);

}  // namespace flowlab
