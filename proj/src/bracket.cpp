#include "flowlab/bracket.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/calculus.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/flow.hpp"

namespace flowlab {

PairingResult distributional_lie_bracket(const VectorField& X, const VectorField& Y,
                                         const BumpTestFn& psi, const Quadrature& q) {
    const Vec2 d = psi.dir();
    return integrate_bump(psi, q, [&](Point2 z) {
        const double p = psi.profile(z);
        if (p == 0.0) return 0.0;
        const Vec2 g = psi.gradient(z);
        const Vec2 x = X(z);
        const Vec2 y = Y(z);
        const double xd = dot(x, d);
        const double yd = dot(y, d);
        const double forward = xd * dot(g, y) + divergence(Y, z) * xd * p;
        const double backward = yd * dot(g, x) + divergence(X, z) * yd * p;
        return forward - backward;
    });
}

Vec2 pointwise_lie_bracket(const VectorField& X, const VectorField& Y, Point2 p, double h) {
    return jacobian_fd(Y, p, h) * X(p) - jacobian_fd(X, p, h) * Y(p);
}

PairingResult pointwise_bracket_pairing(const VectorField& X, const VectorField& Y,
                                        const BumpTestFn& psi, const Quadrature& q, double h) {
    const Vec2 d = psi.dir();
    return integrate_bump(psi, q, [&](Point2 z) {
        const double p = psi.profile(z);
        if (p == 0.0) return 0.0;
        return dot(pointwise_lie_bracket(X, Y, z, h), d) * p;
    });
}

HamiltonianFormResult hamiltonian_form_residual(const VectorField& X, const VectorField& Y,
                                                const BumpTestFn& psi, const Quadrature& q) {
    HamiltonianFormResult r;
    r.definition = distributional_lie_bracket(X, Y, psi, q);
    const Vec2 d = psi.dir();
    r.hamiltonian = integrate_bump(psi, q, [&](Point2 z) {
        const double p = psi.profile(z);
        const Vec2 g = psi.gradient(z);
        if (p == 0.0 && g == Vec2{}) return 0.0;
        const Vec2 x = X(z);
        const Vec2 y = Y(z);
        const Vec2 W = divergence(Y, z) * x - divergence(X, z) * y;
        // d_2 psi_1 - d_1 psi_2 for psi = d * profile.
        const double curl_term = d.x * g.y - d.y * g.x;
        return dot(W, d) * p - dot(x, perp(y)) * curl_term;
    });
    r.residual = std::abs(r.definition.value - r.hamiltonian.value);
    return r;
}

WedgeConstancy is_commuting_invariant(const VectorField& X, const VectorField& Y, const Grid2D& grid,
                                      double tol) {
    if (!X.declared_divergence_free() || !Y.declared_divergence_free())
        throw PreconditionError("wedge-constancy test of commutation needs divergence-free fields");
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = scalar_invariant(X, Y, grid.node(k));
        lo = std::min(lo, w);
        hi = std::max(hi, w);
        sum += w;
    }
    WedgeConstancy out;
    out.width = hi - lo;
    out.mean = sum / static_cast<double>(grid.size());
    out.constant = out.width <= tol * (1.0 + std::abs(out.mean));
    return out;
}

WeakLieDerivativeResult weak_lie_derivative_check(const VectorField& F, const VectorField& Y,
                                                  const VectorField& f,
                                                  const std::vector<BumpTestFn>& family,
                                                  const Quadrature& q) {
    WeakLieDerivativeResult out;
    for (const BumpTestFn& psi : family) {
        const Vec2 d = psi.dir();
        const PairingResult lhs = integrate_bump(psi, q, [&](Point2 z) {
            const double p = psi.profile(z);
            if (p == 0.0) return 0.0;
            const double Fd = dot(F(z), d);
            return Fd * dot(psi.gradient(z), Y(z)) + divergence(Y, z) * Fd * p;
        });
        const PairingResult rhs = integrate_bump(psi, q, [&](Point2 z) {
            const double p = psi.profile(z);
            return p == 0.0 ? 0.0 : dot(f(z), d) * p;
        });
        out.residuals.push_back(std::abs(lhs.value + rhs.value));
        out.max_residual = std::max(out.max_residual, out.residuals.back());
    }
    return out;
}

namespace {

// Shared integrand of T_t and T_{t,s}; phi maps a quadrature node to its
// image under the relevant flow.
template <typename Phi>
PairingResult transport_pairing(const VectorField& Y, const BumpTestFn& psi, const Quadrature& q,
                                Phi&& phi) {
    const Vec2 d = psi.dir();
    return integrate_bump(psi, q, [&](Point2 z) {
        const double p = psi.profile(z);
        if (p == 0.0) return 0.0;
        const Point2 w = phi(z);
        const double wd = dot(w, d);
        return dot(Y(w), d) * p + wd * dot(psi.gradient(z), Y(z)) + divergence(Y, z) * wd * p;
    });
}

}  // namespace

PairingResult T_t(const VectorField& X, const VectorField& Y, double t, const BumpTestFn& psi,
                  const Quadrature& q, double dt) {
    return transport_pairing(Y, psi, q, [&](Point2 z) {
        return t == 0.0 ? z : flow_endpoint(X, z, t, dt, false).point;
    });
}

PairingResult T_ts(const VectorField& X, const VectorField& Y, double t, double s,
                   const BumpTestFn& psi, const Quadrature& q, double dt) {
    return transport_pairing(Y, psi, q, [&](Point2 z) {
        const Point2 a = s == 0.0 ? z : flow_endpoint(Y, z, s, dt, false).point;
        return t == 0.0 ? a : flow_endpoint(X, a, t, dt, false).point;
    });
}

PairingResult dTdt(const VectorField& X, const VectorField& Y, double t, const BumpTestFn& psi,
                   const Quadrature& q, double dt) {
    const Vec2 d = psi.dir();
    return integrate_bump(psi, q, [&](Point2 z) {
        const double p = psi.profile(z);
        if (p == 0.0) return 0.0;
        const Point2 w = t == 0.0 ? z : flow_endpoint(X, z, t, dt, false).point;
        const Vec2 g = psi.gradient(z);
        const double yd = dot(Y(w), d);
        const double xd = dot(X(w), d);
        const double gained = xd * dot(g, Y(z)) + divergence(Y, z) * p * xd;
        const double lost = yd * dot(g, X(z)) + yd * p * divergence(X, z);
        return gained - lost;
    });
}

}  // namespace flowlab
