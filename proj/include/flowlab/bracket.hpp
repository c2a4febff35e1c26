#pragma once

#include <vector>

#include "flowlab/bump.hpp"
#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

/// Weak pairing of [X, Y] with the vector bump psi = d * profile:
///   integral of (X.d)(grad psi . Y) + div Y (X.d) psi
///             - (Y.d)(grad psi . X) - div X (Y.d) psi.
/// Swapping X and Y negates the value exactly.
PairingResult distributional_lie_bracket(const VectorField& X, const VectorField& Y,
                                         const BumpTestFn& psi, const Quadrature& q);

/// DY X - DX Y at p by central differences with step h.
Vec2 pointwise_lie_bracket(const VectorField& X, const VectorField& Y, Point2 p, double h);

/// Quadrature of (pointwise_lie_bracket . d) psi, for smooth backings.
PairingResult pointwise_bracket_pairing(const VectorField& X, const VectorField& Y,
                                        const BumpTestFn& psi, const Quadrature& q, double h);

struct HamiltonianFormResult {
    PairingResult definition;   // distributional_lie_bracket
    PairingResult hamiltonian;  // (div Y X - div X Y - perp-grad(X . perp Y), psi)
    double residual = 0.0;      // |definition - hamiltonian|
};

/// Compares the bracket with div Y X - div X Y - perp-grad(X . perp Y). The
/// perp-gradient term is paired weakly:
///   (perp-grad f, psi) = integral of f (d_2 psi_1 - d_1 psi_2).
HamiltonianFormResult hamiltonian_form_residual(const VectorField& X, const VectorField& Y,
                                                const BumpTestFn& psi, const Quadrature& q);

struct WedgeConstancy {
    bool constant = false;
    double width = 0.0;  // max - min of X . perp Y over the nodes
    double mean = 0.0;
};

/// Samples X . perp Y on the grid; constant when width <= tol (1 + |mean|).
/// For divergence-free pairs this is equivalent to [X, Y] = 0, so both
/// fields must be declared divergence-free.
WedgeConstancy is_commuting_invariant(const VectorField& X, const VectorField& Y, const Grid2D& grid,
                                      double tol);

struct WeakLieDerivativeResult {
    double max_residual = 0.0;
    std::vector<double> residuals;  // one per bump
};

/// Checks that f is the weak derivative of F along Y:
///   integral of (F.d)(grad psi . Y) + div Y (F.d) psi = -integral of (f.d) psi
/// for every bump of the family.
WeakLieDerivativeResult weak_lie_derivative_check(const VectorField& F, const VectorField& Y,
                                                  const VectorField& f,
                                                  const std::vector<BumpTestFn>& family,
                                                  const Quadrature& q);

/// T_t[X,Y](psi) = integral of (Y(phi_t).d) psi + (phi_t.d)(grad psi . Y)
///                 + div Y (phi_t.d) psi, with phi_t the flow of X.
PairingResult T_t(const VectorField& X, const VectorField& Y, double t, const BumpTestFn& psi,
                  const Quadrature& q, double dt);

/// As T_t with phi_t replaced by phi_t^X composed after phi_s^Y.
PairingResult T_ts(const VectorField& X, const VectorField& Y, double t, double s,
                   const BumpTestFn& psi, const Quadrature& q, double dt);

/// The time derivative of T_t by direct quadrature:
///   - (Y(phi_t).d)(grad psi . X) - (Y(phi_t).d) psi div X
///   + (X(phi_t).d)(grad psi . Y) + div Y psi (X(phi_t).d).
PairingResult dTdt(const VectorField& X, const VectorField& Y, double t, const BumpTestFn& psi,
                   const Quadrature& q, double dt);

}  // namespace flowlab
