#pragma once

// Shared fixtures and generators for the unit tests.

#include <cmath>
#include <numbers>
#include <random>

#include "flowlab/field.hpp"

namespace flowlab::testing {

inline constexpr double pi = std::numbers::pi;

inline VectorField rotation() {
    return VectorField::closed_form("rotation", [](Point2 p) { return Vec2{-p.y, p.x}; },
                                    {ScalarField::closed_form("0", [](Point2) { return 0.0; }), true, {}});
}
inline VectorField scaling() {
    return VectorField::closed_form("scaling", [](Point2 p) { return p; },
                                    {ScalarField::closed_form("2", [](Point2) { return 2.0; }), false, {}});
}
inline VectorField constant(Vec2 c) {
    return VectorField::closed_form("constant", [c](Point2) { return c; },
                                    {ScalarField::closed_form("0", [](Point2) { return 0.0; }), true, {}});
}
inline VectorField shear() {
    return VectorField::closed_form("shear", [](Point2 p) { return Vec2{0.0, p.x}; },
                                    {ScalarField::closed_form("0", [](Point2) { return 0.0; }), true, {}});
}
/// Cellular flow with no attached divergence, so calculus falls back to
/// finite differences.
inline VectorField cellular_fd() {
    return VectorField::closed_form("cellular", [](Point2 p) {
        return Vec2{std::sin(p.x) * std::cos(p.y), -std::cos(p.x) * std::sin(p.y)};
    });
}

/// Seeded source of uniform draws for hand-rolled property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace flowlab::testing
