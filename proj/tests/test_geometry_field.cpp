#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "flowlab/calculus.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/expr.hpp"
#include "flowlab/field_io.hpp"
#include "flowlab/mollify.hpp"
#include "support.hpp"

using namespace flowlab;
using namespace flowlab::testing;
using doctest::Approx;

TEST_CASE("grid spacing and node layout") {
    Grid2D g(-2, 2, -1, 1, 5, 3);
    CHECK(g.hx() == 1.0);
    CHECK(g.hy() == 1.0);
    CHECK(g.size() == 15);
    CHECK(g.node(4, 2) == Point2{2, 1});
    CHECK(g.node(g.index(3, 1)) == Point2{1, 0});
    CHECK(g.is_interior(1, 1));
    CHECK_FALSE(g.is_interior(0, 1));
    CHECK_THROWS_AS(Grid2D(0, 0, 0, 1, 4, 4), DomainError);
    CHECK_THROWS_AS(Grid2D(0, 1, 0, 1, 1, 4), DomainError);
    auto snapped = g.snap({1.0 + 1e-9, -1e-9}, 1e-6);
    REQUIRE(snapped);
    CHECK((*snapped)[0] == 3);
    CHECK_FALSE(g.snap({0.5, 0.0}, 1e-6));
}

TEST_CASE("closed-form evaluation") {
    CHECK(rotation()({1, 2}) == Vec2{-2, 1});
    CHECK(scaling()({0, 0}) == Vec2{0, 0});
}

TEST_CASE("bilinear interpolation is exact on linear fields") {
    Grid2D g(-2, 2, -2, 2, 81, 81);
    auto X = VectorField::sampled(g, sample_nodes(rotation(), g), "rotation");
    CHECK(X.backing() == Backing::Sampled);
    Vec2 v = X({0.5, 0.5});
    CHECK(std::abs(v.x + 0.5) <= 1e-12);
    CHECK(std::abs(v.y - 0.5) <= 1e-12);
    Gen gen(7);
    for (int k = 0; k < 200; ++k) {
        Point2 p = gen.point(-2, 2);
        CHECK(distance(X(p), rotation()(p)) <= 1e-12);
    }
    CHECK_THROWS_AS(X({2.5, 0.0}), DomainError);
}

TEST_CASE("non-finite values are rejected") {
    auto bad = VectorField::closed_form("bad", [](Point2 p) { return Vec2{1.0 / p.x, 0.0}; });
    CHECK_THROWS_AS(bad({0.0, 1.0}), NumericDomainError);
}

TEST_CASE("divergence") {
    CHECK(divergence(scaling(), {0.3, -0.2}, 1e-4) == 2.0);
    CHECK(divergence(rotation(), {0.3, -0.2}, 1e-4) == 0.0);
    CHECK(std::abs(divergence(cellular_fd(), {0.3, 0.7}, 1e-4)) <= 1e-7);
    CHECK(divergence_fd(scaling(), {1.0, 1.0}, 1e-4) == Approx(2.0).epsilon(1e-10));

    auto bounded = VectorField::closed_form("bounded", [](Point2 p) { return p; },
                                            {std::nullopt, false, Box{0, 1, 0, 1}});
    // One-sided near the edge, still exact on affine fields.
    CHECK(divergence(bounded, {0.5, 1e-5}, 1e-4) == Approx(2.0).epsilon(1e-9));
    CHECK(divergence(bounded, {1.0, 0.0}, 1e-4) == Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(divergence(bounded, {0.5, -1e-3}, 1e-4), DomainError);
    CHECK_THROWS_AS(divergence_fd(bounded, {0.5, 1e-5}, 1e-4), DomainError);
    CHECK(default_fd_step(Box{0, 3, 0, 4}) == Approx(5e-4));
}

TEST_CASE("perp and the wedge invariant") {
    CHECK(perp({1, 0}) == Vec2{0, 1});
    auto e1 = constant({1, 0});
    auto e2 = constant({0, 1});
    Gen gen(11);
    for (int k = 0; k < 50; ++k) CHECK(scalar_invariant(e1, e2, gen.point(-3, 3)) == -1.0);
    CHECK(scalar_invariant(scaling(), rotation(), {1, 0}) == -1.0);
    CHECK(scalar_invariant(scaling(), rotation(), {2, 0}) == -4.0);
}

TEST_CASE("property: perp twice negates, wedge is antisymmetric") {
    Gen gen(3);
    for (int k = 0; k < 500; ++k) {
        Vec2 v = gen.point(-10, 10);
        CHECK(perp(perp(v)) == -v);
        Point2 p = gen.point(-2, 2);
        CHECK(scalar_invariant(cellular_fd(), shear(), p) == -scalar_invariant(shear(), cellular_fd(), p));
    }
}

TEST_CASE("finite-difference Jacobians of linear fields") {
    auto close = [](const Mat2& a, const Mat2& b) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (std::abs(a(i, j) - b(i, j)) > 1e-10) return false;
        return true;
    };
    Gen gen(5);
    for (int k = 0; k < 100; ++k) {
        Point2 p = gen.point(-2, 2);
        CHECK(close(jacobian_fd(scaling(), p, 1e-4), Mat2::identity()));
        CHECK(close(jacobian_fd(rotation(), p, 1e-4), Mat2{{{{0, -1}, {1, 0}}}}));
        CHECK(close(jacobian_fd(shear(), p, 1e-4), Mat2{{{{0, 0}, {1, 0}}}}));
        // A random linear field.
        Mat2 A{{{{gen.uniform(-3, 3), gen.uniform(-3, 3)}, {gen.uniform(-3, 3), gen.uniform(-3, 3)}}}};
        auto L = VectorField::closed_form("linear", [A](Point2 q) { return A * q; });
        CHECK(close(jacobian_fd(L, p, 1e-4), A));
    }
}

TEST_CASE("declared divergence-free fields pass the finite-difference audit") {
    Grid2D g(-2, 2, -2, 2, 41, 41);
    CHECK(max_divergence_fd(rotation(), g, 1e-4, 1e-4) <= 1e-6);
    CHECK(max_divergence_fd(shear(), g, 1e-4, 1e-4) <= 1e-6);
    CHECK(max_divergence_fd(cellular_fd(), g, 1e-4, 1e-4) <= 1e-6);
    CHECK(max_divergence_fd(scaling(), g, 1e-4, 1e-4) > 1.0);
}

TEST_CASE("mollification") {
    Grid2D g(-2, 2, -2, 2, 81, 81);
    SUBCASE("constants are preserved") {
        auto M = mollify(constant({1, 0}), 0.2, g);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(distance(M(g.node(k)), Vec2{1, 0}) <= 1e-14);
    }
    SUBCASE("affine fields are preserved") {
        auto M = mollify(scaling(), 0.1, g);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(distance(M(g.node(k)), g.node(k)) <= 1e-12);
    }
    SUBCASE("under-resolved kernel") {
        CHECK_THROWS_AS(mollify(scaling(), 0.05, g), ResolutionError);
    }
    SUBCASE("first-order convergence on the cellular field") {
        Grid2D fine(-2, 2, -2, 2, 161, 161);
        const double d2 = l1_distance(mollify(cellular_fd(), 0.2, fine), cellular_fd(), fine);
        const double d1 = l1_distance(mollify(cellular_fd(), 0.1, fine), cellular_fd(), fine);
        CHECK(d1 / d2 <= 0.6);
    }
    SUBCASE("second moment: mollified field is f + eps^2/20 Laplacian f") {
        // For cellular u = sin x cos y, Laplacian u = -2u.
        const double eps = 0.2;
        auto M = mollify(cellular_fd(), eps, g);
        Point2 p{0.3, 0.7};
        auto s = g.snap({0.3, 0.7}, 1e-9);
        REQUIRE(s);
        Vec2 u = cellular_fd()(p);
        Vec2 expected = u - (eps * eps / 20.0) * 2.0 * u;
        CHECK(distance(M(p), expected) <= 2e-4);
    }
    SUBCASE("divergence-free property survives") {
        auto M = mollify(cellular_fd(), 0.2, g);
        CHECK(M.declared_divergence_free() == false);
        auto R = mollify(rotation(), 0.2, g);
        CHECK(R.declared_divergence_free());
        // Node-level central differences commute with the discrete convolution.
        double worst = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                Point2 p = g.node(i, j);
                if (!g.box().contains(p, 0.2 + 2 * g.hx())) continue;
                worst = std::max(worst, std::abs(divergence_fd(M, p, g.hx())));
            }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("CSV round trip") {
    auto dir = std::filesystem::temp_directory_path() / "flowlab_csv_test";
    std::filesystem::create_directories(dir);
    Grid2D g(-1, 1, 0, 2, 17, 9);
    auto path = (dir / "rot.csv").string();
    write_vector_csv(path, rotation(), g);
    auto X = load_vector_csv(path, "rot");
    REQUIRE(X.samples());
    CHECK(X.samples()->grid.nx() == 17);
    CHECK(X.samples()->grid.ny() == 9);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(X(g.node(k)) == rotation()(g.node(k)));

    auto spath = (dir / "h.csv").string();
    auto H = ScalarField::closed_form("H", [](Point2 p) { return p.x * p.x - p.y; });
    write_scalar_csv(spath, H, g);
    auto Hs = load_scalar_csv(spath);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(Hs(g.node(k)) == H(g.node(k)));

    // Row order does not matter.
    {
        std::FILE* f = std::fopen((dir / "shuffled.csv").string().c_str(), "w");
        std::fputs("x,y,f\n1,1,4\n0,0,1\n1,0,2\n0,1,3\n", f);
        std::fclose(f);
    }
    auto S = load_scalar_csv((dir / "shuffled.csv").string());
    CHECK(S({0.5, 0.5}) == Approx(2.5));

    {
        std::FILE* f = std::fopen((dir / "missing.csv").string().c_str(), "w");
        std::fputs("x,y,f\n1,1,4\n0,0,1\n1,0,2\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_scalar_csv((dir / "missing.csv").string()), IoError);
    CHECK_THROWS_AS(load_scalar_csv((dir / "nope.csv").string()), IoError);
    CHECK_THROWS_AS(load_vector_csv(spath), IoError);
    std::filesystem::remove_all(dir);
}
