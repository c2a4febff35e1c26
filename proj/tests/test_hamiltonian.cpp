#include <cmath>

#include "doctest.h"
#include "flowlab/catalog.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/hamiltonian.hpp"
#include "support.hpp"

using namespace flowlab;
using namespace flowlab::testing;

namespace {

ScalarField half_radius_squared() {
    return ScalarField::closed_form("r^2/2", [](Point2 p) { return 0.5 * (p.x * p.x + p.y * p.y); });
}

ScalarField minus_sin_sin() {
    return ScalarField::closed_form("-sin x sin y", [](Point2 p) { return -std::sin(p.x) * std::sin(p.y); });
}

void check_curve_invariants(const LevelCurve& c) {
    REQUIRE(c.vertices.size() >= 4);
    CHECK(c.vertices.front() == c.vertices.back());
    REQUIRE(c.arclength.size() == c.vertices.size());
    CHECK(c.arclength.front() == 0.0);
    for (std::size_t k = 1; k < c.arclength.size(); ++k) {
        CHECK(c.arclength[k] > c.arclength[k - 1]);
        CHECK(distance(c.vertices[k], c.vertices[k - 1]) > 0.0);
    }
    CHECK(c.arclength.back() == c.length);
    CHECK(c.is_simple());
}

}  // namespace

TEST_CASE("Hamiltonian reconstruction") {
    SUBCASE("rotation") {
        const Grid2D g(-2, 2, -2, 2, 81, 81);
        const HamiltonianResult r = reconstruct_hamiltonian(rotation(), g, {0, 0});
        CHECK(std::abs(r.H({1, 1}) - 1.0) <= 1e-6);
        CHECK(r.H({0, 0}) == 0.0);
        CHECK(r.residual <= 1e-12);
    }
    SUBCASE("constant") {
        const Grid2D g(-1, 4, -1, 4, 51, 51);
        const HamiltonianResult r = reconstruct_hamiltonian(constant({1, 0}), g, {0, 0});
        CHECK(std::abs(r.H({3, 2}) + 2.0) <= 1e-9);
    }
    SUBCASE("cellular") {
        const Grid2D g(0, pi, 0, pi, 161, 161);
        const HamiltonianResult r = reconstruct_hamiltonian(cellular_fd(), g, {0, 0});
        CHECK(std::abs(r.H({pi / 2, pi / 2}) + 1.0) <= 1e-4);
        CHECK(r.residual <= 1e-5);
        CHECK(r.pointwise_residual <= 1e-4);
    }
    SUBCASE("divergence-free catalog fields at 161 x 161") {
        const Grid2D g(-2, 2, -2, 2, 161, 161);
        for (const char* name : {"rotation", "constant", "cellular", "shear", "hyperbolic"}) {
            CAPTURE(name);
            const VectorField X = make_builtin(name);
            const HamiltonianResult r = reconstruct_hamiltonian(X, g, {0, 0});
            CHECK(r.residual <= 1e-5);
        }
    }
    SUBCASE("non-divergence-free input is a model error") {
        const Grid2D g(-1, 1, -1, 1, 41, 41);
        CHECK_THROWS_AS(reconstruct_hamiltonian(scaling(), g, {0, 0}), ModelError);
    }
    SUBCASE("base must be a node") {
        const Grid2D g(-1, 1, -1, 1, 40, 40);
        CHECK_THROWS_AS(reconstruct_hamiltonian(rotation(), g, {0, 0}), PreconditionError);
    }
}

TEST_CASE("level-set extraction") {
    SUBCASE("unit circle") {
        const Grid2D g(-2, 2, -2, 2, 161, 161);
        const LevelSetDecomposition d = extract_level_set(half_radius_squared(), 0.5, g, nullptr);
        REQUIRE(d.curves.size() == 1);
        const LevelCurve& c = d.curves[0];
        check_curve_invariants(c);
        CHECK(std::abs(c.length - 2 * pi) <= 1e-2);
        for (const Point2& v : c.vertices) CHECK(std::abs(norm(v) - 1.0) <= 1e-3);
        // Higher H on the right: counterclockwise around the minimum, the
        // direction of perp-grad H = (-y, x).
        CHECK(c.orientation == 1);
        CHECK(std::abs(c.signed_area() - pi) <= 1e-2);
    }
    SUBCASE("orientation follows X when supplied") {
        const Grid2D g(-2, 2, -2, 2, 81, 81);
        const VectorField X = rotation();
        const LevelSetDecomposition d = extract_level_set(half_radius_squared(), 0.5, g, &X);
        REQUIRE(d.curves.size() == 1);
        CHECK(d.curves[0].orientation == 1);
        const LevelCurve& c = d.curves[0];
        const Vec2 tangent = c.vertices[1] - c.vertices[0];
        CHECK(dot(tangent, X(c.vertices[0])) > 0.0);
        REQUIRE(d.min_speed);
        CHECK(std::abs(*d.min_speed - 1.0) <= 1e-3);
    }
    SUBCASE("straight level line is discarded") {
        const Grid2D g(-1, 1, -1, 1, 41, 41);
        const auto H = ScalarField::closed_form("-y", [](Point2 p) { return -p.y; });
        const LevelSetDecomposition d = extract_level_set(H, 0.0, g);
        CHECK(d.curves.empty());
        CHECK(d.discarded_open_chains == 1);
        CHECK(d.contoured_level != 0.0);
    }
    SUBCASE("single cell of the cellular flow") {
        const Grid2D g(0, pi, 0, pi, 161, 161);
        const LevelSetDecomposition d = extract_level_set(minus_sin_sin(), -0.5, g);
        REQUIRE(d.curves.size() == 1);
        check_curve_invariants(d.curves[0]);
        Point2 mean{0, 0};
        for (std::size_t k = 0; k + 1 < d.curves[0].vertices.size(); ++k) mean = mean + d.curves[0].vertices[k];
        mean = mean / static_cast<double>(d.curves[0].vertices.size() - 1);
        CHECK(distance(mean, Point2{pi / 2, pi / 2}) <= 1e-3);
        CHECK(extract_level_set(minus_sin_sin(), 0.5, g).curves.empty());
    }
    SUBCASE("empty level") {
        const Grid2D g(-1, 1, -1, 1, 21, 21);
        CHECK(extract_level_set(half_radius_squared(), 10.0, g).curves.empty());
    }
    SUBCASE("random levels of a multi-cell Hamiltonian keep the invariants") {
        const Grid2D g(-3, 3, -3, 3, 121, 121);
        Gen gen(3);
        for (int k = 0; k < 20; ++k) {
            const double h = gen.uniform(-0.95, 0.95);
            const LevelSetDecomposition d = extract_level_set(minus_sin_sin(), h, g);
            for (const LevelCurve& c : d.curves) check_curve_invariants(c);
        }
    }
    SUBCASE("parallel fields share level sets") {
        const Grid2D g(0, pi, 0, pi, 121, 121);
        const VectorField X = make_builtin("cellular");
        const VectorField Y = make_builtin("cellular", {{"amplitude", 2}});
        const ScalarField H = reconstruct_hamiltonian(X, g, {0, 0}).H;
        const ScalarField K = reconstruct_hamiltonian(Y, g, {0, 0}).H;
        for (double h : {0.2, 0.5, 0.8}) {
            const auto a = extract_level_set(H, h, g);
            const auto b = extract_level_set(K, 2 * h, g);
            REQUIRE(a.curves.size() == b.curves.size());
            for (std::size_t c = 0; c < a.curves.size(); ++c) {
                REQUIRE(a.curves[c].vertices.size() == b.curves[c].vertices.size());
                for (std::size_t v = 0; v < a.curves[c].vertices.size(); ++v)
                    CHECK(distance(a.curves[c].vertices[v], b.curves[c].vertices[v]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("speed on curves") {
    const Grid2D g(-3, 3, -3, 3, 161, 161);
    const VectorField X = rotation();
    CHECK(std::abs(min_speed_on_curve(X, extract_level_set(half_radius_squared(), 0.5, g).curves.at(0)) - 1.0) <= 1e-3);
    CHECK(std::abs(min_speed_on_curve(X, extract_level_set(half_radius_squared(), 2.0, g).curves.at(0)) - 2.0) <= 1e-3);
    // A circle crossing the y-axis sees X = (0, x) vanish there.
    const LevelCurve c = extract_level_set(half_radius_squared(), 0.5, g).curves.at(0);
    double spacing = 0.0;
    for (std::size_t k = 1; k < c.vertices.size(); ++k) spacing = std::max(spacing, distance(c.vertices[k], c.vertices[k - 1]));
    CHECK(min_speed_on_curve(shear(), c) <= spacing);
}

TEST_CASE("level-set flow") {
    const Grid2D g(-2, 2, -2, 2, 161, 161);
    const VectorField X = rotation();
    const LevelCurve c = extract_level_set(half_radius_squared(), 0.5, g, &X).curves.at(0);
    CHECK(std::abs(period(X, c) - 2 * pi) <= 1e-2);
    CHECK(distance(level_set_flow(X, c, {1, 0}, pi / 2), Point2{0, 1}) <= 1e-3);
    CHECK(distance(level_set_flow(X, c, {1, 0}, 2 * pi), Point2{1, 0}) <= 1e-3);
    const double P = period(X, c);
    CHECK(distance(level_set_flow(X, c, {1, 0}, 2 * P + 0.3), level_set_flow(X, c, {1, 0}, 0.3)) <= 1e-9);
    CHECK(level_set_flow(X, c, {0.6, 0.8}, 0.0) == Point2{0.6, 0.8});
    SUBCASE("agrees with the ODE flow") {
        for (double t : {0.5, 1.0, 3.0}) {
            const Point2 ode = flow_endpoint(X, {1, 0}, t, 1e-3, false).point;
            CHECK(distance(level_set_flow(X, c, {1, 0}, t), ode) <= 2e-3);
        }
    }
    SUBCASE("backward time") {
        CHECK(distance(level_set_flow(X, c, {1, 0}, -pi / 2), Point2{0, -1}) <= 1e-3);
    }
    SUBCASE("off-curve start") { CHECK_THROWS_AS(level_set_flow(X, c, {1.5, 0}, 1.0), SnapError); }
    SUBCASE("singular curves") {
        const VectorField S = shear();
        CHECK_THROWS_AS(level_set_flow(S, c, {1, 0}, 1.0), SingularError);
        LevelSetFlowOptions opts;
        opts.speed_tolerance = 1e-2;
        opts.singular = SingularPolicy::Identity;
        CHECK(level_set_flow(S, c, {1, 0}, 1.0, opts) == Point2{1, 0});
    }
}

TEST_CASE("conservation along trajectories") {
    const Trajectory rot = integrate_flow(rotation(), {1, 0}, 2 * pi, 1e-3);
    CHECK(hamiltonian_conservation(half_radius_squared(), rot) <= 1e-9);
    const Trajectory line = integrate_flow(constant({1, 0}), {0, 0.25}, 3.0, 1e-3);
    CHECK(hamiltonian_conservation(ScalarField::closed_form("-y", [](Point2 p) { return -p.y; }), line) <= 1e-15);
    const Trajectory cell = integrate_flow(cellular_fd(), {1.0, 1.2}, 5.0, 1e-3);
    CHECK(hamiltonian_conservation(minus_sin_sin(), cell) <= 1e-6);
}
