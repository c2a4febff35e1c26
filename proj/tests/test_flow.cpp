#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flowlab/catalog.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/mollify.hpp"
#include "support.hpp"

using namespace flowlab;
using namespace flowlab::testing;

namespace {

VectorField hyperbolic() { return make_builtin("hyperbolic"); }
VectorField cellular() { return make_builtin("cellular"); }

}  // namespace

TEST_CASE("integrate_flow matches closed-form solutions") {
    SUBCASE("rotation quarter turn") {
        const Trajectory tr = integrate_flow(rotation(), {1, 0}, pi / 2, 1e-3);
        CHECK(distance(tr.final_point(), Point2{0, 1}) <= 1e-9);
        CHECK(tr.times.front() == 0.0);
        CHECK(tr.times.back() == doctest::Approx(pi / 2).epsilon(1e-14));
        CHECK(tr.times.size() == tr.points.size());
        CHECK(tr.densities.size() == tr.points.size());
    }
    SUBCASE("t = 0 is a single sample") {
        const Trajectory tr = integrate_flow(cellular(), {0.3, 0.4}, 0.0, 1e-3);
        REQUIRE(tr.size() == 1);
        CHECK(tr.final_point() == Point2{0.3, 0.4});
        CHECK(tr.final_density() == 1.0);
    }
    SUBCASE("shear is exact") {
        Gen gen(11);
        for (int k = 0; k < 50; ++k) {
            const Point2 z = gen.point(-2, 2);
            const double t = gen.uniform(-1.5, 1.5);
            const Point2 end = integrate_flow(shear(), z, t, 1e-2).final_point();
            CHECK(std::abs(end.x - z.x) <= 1e-14);
            CHECK(std::abs(end.y - (z.y + t * z.x)) <= 1e-12);
        }
    }
    SUBCASE("negative time runs backward with signed times") {
        const Trajectory tr = integrate_flow(scaling(), {1, 1}, -0.5, 1e-3);
        CHECK(tr.times.back() == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(tr.times[1] < 0.0);
        CHECK(distance(tr.final_point(), Point2{std::exp(-0.5), std::exp(-0.5)}) <= 1e-10);
        CHECK(std::abs(tr.final_density() - std::exp(-1.0)) <= 1e-10);
    }
    SUBCASE("last step is shortened to land on t") {
        const Trajectory tr = integrate_flow(constant({1, 0}), {0, 0}, 0.0105, 1e-3);
        CHECK(tr.size() == 12);
        CHECK(tr.final_point().x == doctest::Approx(0.0105).epsilon(1e-13));
    }
    CHECK_THROWS_AS(integrate_flow(rotation(), {1, 0}, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(integrate_flow(rotation(), {1, 0}, 1e6, 1e-3), PreconditionError);
}

TEST_CASE("escape carries the exit time") {
    VectorField::Options opts;
    opts.domain = Box{-1, 1, -1, 1};
    const auto X = VectorField::closed_form("right", [](Point2) { return Vec2{1, 0}; }, opts);
    try {
        integrate_flow(X, {0, 0}, 3.0, 1e-3);
        FAIL("expected escape");
    } catch (const EscapeError& e) {
        CHECK(e.exit_time() == doctest::Approx(1.0).epsilon(2e-3));
    }
}

TEST_CASE("Liouville density") {
    CHECK(std::abs(flow_endpoint(scaling(), {0.5, -0.25}, 0.5, 1e-3).density - std::exp(1.0)) <= 1e-6);
    for (const VectorField& X : {rotation(), hyperbolic(), cellular(), cellular_fd()}) {
        const Trajectory tr = integrate_flow(X, {0.7, -0.4}, 1.3, 1e-3);
        for (double xi : tr.densities) CHECK(std::abs(xi - 1.0) <= 1e-9);
    }
    SUBCASE("density_along reproduces the integrated densities") {
        Trajectory tr = integrate_flow(scaling(), {0.2, 0.1}, 0.8, 1e-3);
        const std::vector<double> before = tr.densities;
        std::fill(tr.densities.begin(), tr.densities.end(), 1.0);
        const Trajectory again = density_along(scaling(), tr);
        for (std::size_t k = 0; k < before.size(); ++k)
            CHECK(again.densities[k] == doctest::Approx(before[k]).epsilon(1e-12));
    }
    SUBCASE("densities stay inside the nearly-incompressible bound") {
        const Grid2D g(-1, 1, -1, 1, 9, 9);
        const FlowMap fm = flow_map(scaling(), g, 0.4, 1e-3);
        const double C = std::exp(2.0 * 0.4) * 1.05;
        for (double xi : fm.densities) {
            CHECK(xi >= 1.0 / C);
            CHECK(xi <= C);
        }
    }
}

TEST_CASE("flow maps") {
    const Grid2D g(-2, 2, -2, 2, 11, 11);
    SUBCASE("half turn maps nodes to antipodes") {
        const FlowMap fm = flow_map(rotation(), g, pi, 1e-3);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(distance(fm.points[k], -1.0 * g.node(k)) <= 1e-8);
        CHECK(fm.escaped_count() == 0);
    }
    SUBCASE("t = 0 is the identity") {
        const FlowMap fm = flow_map(cellular(), g, 0.0, 1e-3);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(fm.points[k] == g.node(k));
    }
    SUBCASE("scaling doubles at ln 2") {
        const FlowMap fm = flow_map(scaling(), g, std::log(2.0), 1e-3);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(distance(fm.points[k], 2.0 * g.node(k)) <= 1e-7);
    }
    SUBCASE("escapes are recorded, not fatal") {
        VectorField::Options opts;
        opts.domain = Box{-2, 2, -2, 2};
        const auto X = VectorField::closed_form("right", [](Point2) { return Vec2{1, 0}; }, opts);
        const FlowMap fm = flow_map(X, g, 1.0, 1e-2);
        CHECK(fm.escaped(10, 3));
        CHECK_FALSE(fm.escaped(0, 3));
        CHECK(fm.escaped_count() == 3 * 11);
    }
}

TEST_CASE("Jacobian determinant and compressibility") {
    const Grid2D g(-1, 1, -1, 1, 21, 21);
    SUBCASE("area-preserving fields") {
        for (const VectorField& X : {rotation(), hyperbolic(), cellular(), shear()}) {
            const FlowMap fm = flow_map(X, g, 0.5, 1e-3);
            for (int j = 1; j < 20; ++j)
                for (int i = 1; i < 20; ++i) CHECK(std::abs(jacobian_det_fd(fm, i, j) - 1.0) <= 1e-3);
            CHECK(compressibility_estimate(fm) <= 1.01);
        }
    }
    SUBCASE("scaling matches its density") {
        const FlowMap fm = flow_map(scaling(), g, 0.5, 1e-3);
        for (int j = 1; j < 20; ++j)
            for (int i = 1; i < 20; ++i) {
                const double det = jacobian_det_fd(fm, i, j);
                CHECK(std::abs(det - std::exp(1.0)) <= 1e-2);
                CHECK(std::abs(det - fm.densities[g.index(i, j)]) <= 1e-2 * det);
            }
    }
    const FlowMap fm = flow_map(rotation(), g, 0.5, 1e-3);
    CHECK_THROWS_AS(jacobian_det_fd(fm, 0, 5), DomainError);
}

TEST_CASE("semigroup and reversibility on catalog fields") {
    Gen gen(5);
    for (const auto& info : builtins()) {
        std::map<std::string, double> params;
        if (info.name == "linear") params = {{"a11", 0.3}, {"a12", -1}, {"a21", 0.5}, {"a22", 0.1}};
        const VectorField X = make_builtin(info.name, params);
        CAPTURE(info.name);
        for (int k = 0; k < 10; ++k) {
            const Point2 z = gen.point(-1, 1);
            for (double t : {0.3, 0.7})
                for (double s : {0.3, 0.7}) {
                    const Point2 direct = flow_endpoint(X, z, t + s, 1e-3, false).point;
                    const Point2 composed =
                        flow_endpoint(X, flow_endpoint(X, z, s, 1e-3, false).point, t, 1e-3, false).point;
                    CHECK(distance(direct, composed) <= 1e-6);
                }
            const Point2 fwd = flow_endpoint(X, z, 0.7, 1e-3, false).point;
            CHECK(distance(flow_endpoint(X, fwd, -0.7, 1e-3, false).point, z) <= 1e-6);
        }
    }
}

TEST_CASE("RK4 converges at fourth order") {
    const Point2 exact{std::cos(2.0), std::sin(2.0)};
    const double coarse = distance(flow_endpoint(rotation(), {1, 0}, 2.0, 0.1, false).point, exact);
    const double fine = distance(flow_endpoint(rotation(), {1, 0}, 2.0, 0.05, false).point, exact);
    CHECK(coarse / fine >= 12.0);
}

TEST_CASE("change of variables") {
    const BumpTestFn psi = BumpTestFn::scalar({0.3, -0.2}, 0.5);
    const Quadrature q{Box{-2, 2, -2, 2}, 161};
    SUBCASE("rotation preserves the integral") {
        const ChangeOfVarResult r = change_of_var_check(rotation(), 0.8, psi, q, 1e-2);
        CHECK(std::abs(r.lhs - psi.mass()) <= 5e-4);
        CHECK(std::abs(r.rhs - psi.mass()) <= 5e-4);
    }
    SUBCASE("t = 0 gives equal sides") {
        const ChangeOfVarResult r = change_of_var_check(scaling(), 0.0, psi, q, 1e-2);
        CHECK(r.lhs == r.rhs);
    }
    SUBCASE("scaling: both sides equal e^{2t} times the mass") {
        const ChangeOfVarResult r = change_of_var_check(scaling(), 0.3, psi, q, 1e-2);
        CHECK(std::abs(r.lhs - r.rhs) / std::abs(r.lhs) <= 1e-2);
        CHECK(std::abs(r.lhs - std::exp(0.6) * psi.mass()) <= 1e-2 * r.lhs);
    }
}

TEST_CASE("stability under mollification") {
    const Grid2D g(-1, 1, -1, 1, 81, 81);
    SUBCASE("linear fields are unchanged in the interior") {
        const Grid2D inner(-0.5, 0.5, -0.5, 0.5, 81, 81);
        const auto rows = stability_check(rotation(), {0.4, 0.2, 0.1}, 0.5, inner, 1e-3);
        for (const auto& r : rows) CHECK(r.mean_distance <= 1e-6);
    }
    SUBCASE("cellular distances decrease") {
        const auto rows = stability_check(cellular(), {0.4, 0.2, 0.1}, 1.0, g, 1e-2);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].mean_distance > rows[1].mean_distance);
        CHECK(rows[1].mean_distance > rows[2].mean_distance);
        CHECK(rows[2].mean_distance < 1e-3);
    }
    CHECK_THROWS_AS(stability_check(rotation(), {0.1, 0.2}, 0.5, g, 1e-3), PreconditionError);
}

TEST_CASE("flow gradient diagnostic") {
    const Grid2D g(-1, 1, -1, 1, 21, 21);
    const auto all = [](Point2) { return true; };
    for (double t : {0.0, 0.9}) {
        const GradientDiagnostic d = flow_gradient_diagnostic(flow_map(rotation(), g, t, 1e-3), all, 2.0);
        CHECK(std::abs(d.min_node_norm - std::sqrt(2.0)) <= 1e-6);
        CHECK(std::abs(d.max_node_norm - std::sqrt(2.0)) <= 1e-6);
        CHECK(d.nodes == 19 * 19);
        // (sum 2 hx hy)^(1/2) over 19^2 interior nodes.
        CHECK(d.lp_norm == doctest::Approx(std::sqrt(2.0 * 19 * 19 * 0.01)).epsilon(1e-6));
    }
    const GradientDiagnostic s = flow_gradient_diagnostic(flow_map(shear(), g, 1.0, 1e-3), all, 2.0);
    CHECK(std::abs(s.max_node_norm - std::sqrt(3.0)) <= 1e-6);
    CHECK_THROWS_AS(flow_gradient_diagnostic(flow_map(shear(), g, 1.0, 1e-3),
                                             [](Point2 p) { return p.x > 5; }, 2.0),
                    DomainError);
}

TEST_CASE("CSV export") {
    const auto dir = std::filesystem::temp_directory_path() / "flowlab_test_flow";
    std::filesystem::create_directories(dir);
    const Trajectory tr = integrate_flow(rotation(), {1, 0}, 0.01, 1e-3);
    write_trajectory_csv((dir / "traj.csv").string(), tr);
    std::ifstream in(dir / "traj.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x,y,xi");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == static_cast<int>(tr.size()));
    write_flow_map_csv((dir / "map.csv").string(), flow_map(rotation(), Grid2D(0, 1, 0, 1, 3, 3), 0.1, 1e-2));
    std::ifstream m(dir / "map.csv");
    std::getline(m, header);
    CHECK(header == "x0,y0,x1,y1,xi");
    std::filesystem::remove_all(dir);
}
