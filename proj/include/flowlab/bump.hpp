#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "flowlab/geometry.hpp"

namespace flowlab {

/// Compactly supported C^2 test function psi(z) = ((1 - |z-c|^2/r^2)_+)^3,
/// optionally carried along a unit direction to make a vector test field.
struct BumpTestFn {
    Point2 center;
    double radius = 1.0;
    std::optional<Vec2> direction;  // empty for scalar pairings

    static BumpTestFn scalar(Point2 center, double radius);
    /// `direction` is normalized; a zero direction is rejected.
    static BumpTestFn vector(Point2 center, double radius, Vec2 direction);

    double profile(Point2 z) const;
    Vec2 gradient(Point2 z) const;
    /// Vector value direction * profile. Requires a direction.
    Vec2 value(Point2 z) const;
    const Vec2& dir() const;

    Box support_box() const;
    /// Closed-form integral of the profile, pi r^2 / 4.
    double mass() const;
};

/// A quadrature value with its resolution and Richardson error estimate.
struct PairingResult {
    double value = 0.0;
    int cells = 0;
    double error_estimate = 0.0;
};

/// Midpoint rule over a bump's support box. `domain` bounds where the
/// integrand may be evaluated.
struct Quadrature {
    Box domain;
    int cells = 161;
};

/// Midpoint rule over `box` with `cells` and cells/2 cells per side, with
/// the Richardson estimate between the two.
PairingResult integrate_box(const Box& box, int cells, const std::function<double(Point2)>& f);

/// Integrates f over psi's support box with q.cells cells per side and again
/// with q.cells/2; the error estimate is |Q_n - Q_c| / ((n/c)^2 - 1). The
/// support box must lie inside q.domain.
PairingResult integrate_bump(const BumpTestFn& psi, const Quadrature& q,
                             const std::function<double(Point2)>& f);

/// The standard family: centers (+-a, +-a) with both coordinate directions.
std::vector<BumpTestFn> bump_family(double offset, double radius);

}  // namespace flowlab
