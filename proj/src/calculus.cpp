#include "flowlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

void require_stencil(const VectorField& X, Point2 p, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw PreconditionError("finite-difference step must be positive, got " + std::to_string(h));
    if (!X.contains(p, h))
        throw DomainError("stencil of width " + std::to_string(h) + " around (" +
                          std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") leaves the domain of '" + X.name() + "'");
}

}  // namespace

double default_fd_step(const Box& domain) { return 1e-4 * domain.diameter(); }

double fd_step(const VectorField& X) {
    return X.domain() ? default_fd_step(*X.domain()) : 1e-4;
}

double divergence(const VectorField& X, Point2 p) { return divergence(X, p, fd_step(X)); }

namespace {

// d(component)/d(axis) at p: central where the stencil fits, otherwise the
// second-order one-sided difference pointing into the domain.
double partial(const VectorField& X, Point2 p, double h, Vec2 axis, double Vec2::*component) {
    const Point2 fwd = p + h * axis;
    const Point2 bwd = p - h * axis;
    const bool f = X.contains(fwd), b = X.contains(bwd);
    if (f && b) return (X(fwd).*component - X(bwd).*component) / (2.0 * h);
    const double s = f ? 1.0 : -1.0;
    if (!X.contains(p + 2.0 * s * h * axis))
        throw DomainError("domain of '" + X.name() + "' is too thin for a step of " + std::to_string(h));
    return s * (-3.0 * (X(p).*component) + 4.0 * (X(p + s * h * axis).*component) -
                (X(p + 2.0 * s * h * axis).*component)) /
           (2.0 * h);
}

}  // namespace

double divergence(const VectorField& X, Point2 p, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw PreconditionError("finite-difference step must be positive, got " + std::to_string(h));
    if (!X.contains(p)) throw DomainError("divergence requested outside the domain of '" + X.name() + "'");
    if (const auto& div = X.analytic_divergence()) return (*div)(p);
    if (X.contains(p, h)) return divergence_fd(X, p, h);
    return partial(X, p, h, {1.0, 0.0}, &Vec2::x) + partial(X, p, h, {0.0, 1.0}, &Vec2::y);
}

double divergence_fd(const VectorField& X, Point2 p, double h) {
    require_stencil(X, p, h);
    const double du = X(p + Vec2{h, 0.0}).x - X(p - Vec2{h, 0.0}).x;
    const double dv = X(p + Vec2{0.0, h}).y - X(p - Vec2{0.0, h}).y;
    return (du + dv) / (2.0 * h);
}

Mat2 jacobian_fd(const VectorField& X, Point2 p, double h) {
    require_stencil(X, p, h);
    const Vec2 dx = (X(p + Vec2{h, 0.0}) - X(p - Vec2{h, 0.0})) / (2.0 * h);
    const Vec2 dy = (X(p + Vec2{0.0, h}) - X(p - Vec2{0.0, h})) / (2.0 * h);
    return Mat2::from_columns(dx, dy);
}

double scalar_invariant(const VectorField& X, const VectorField& Y, Point2 p) {
    return dot(X(p), perp(Y(p)));
}

ScalarField wedge_field(const VectorField& X, const VectorField& Y) {
    std::optional<Box> domain;
    if (X.domain() && Y.domain()) {
        const Box& a = *X.domain();
        const Box& b = *Y.domain();
        domain = Box{std::max(a.xmin, b.xmin), std::min(a.xmax, b.xmax), std::max(a.ymin, b.ymin),
                     std::min(a.ymax, b.ymax)};
    } else if (X.domain()) {
        domain = X.domain();
    } else {
        domain = Y.domain();
    }
    return ScalarField::closed_form(
        X.name() + " ^ " + Y.name(), [X, Y](Point2 p) { return scalar_invariant(X, Y, p); },
        domain);
}

double max_divergence_fd(const VectorField& X, const Grid2D& grid, double h, double margin) {
    double worst = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const Point2 p = grid.node(i, j);
            if (!grid.box().contains(p, margin)) continue;
            worst = std::max(worst, std::abs(divergence_fd(X, p, h)));
        }
    }
    return worst;
}

}  // namespace flowlab
