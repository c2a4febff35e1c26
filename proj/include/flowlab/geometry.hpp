#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace flowlab {

/// Point or vector in the plane. Used for both roles; the distinction is
/// carried by variable names, not by the type.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

using Point2 = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// Planar cross product a.x*b.y - a.y*b.x.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Counterclockwise quarter turn: (x, y) -> (-y, x).
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

/// 2x2 matrix, row-major. For Jacobians, row i is the gradient of
/// component i, so m[i][j] = d(component i)/d(coordinate j).
struct Mat2 {
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    static constexpr Mat2 identity() { return Mat2{{{{1.0, 0.0}, {0.0, 1.0}}}}; }
    static constexpr Mat2 from_columns(Vec2 c0, Vec2 c1) {
        return Mat2{{{{c0.x, c1.x}, {c0.y, c1.y}}}};
    }

    constexpr double operator()(int i, int j) const { return m[i][j]; }
    constexpr double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    constexpr double trace() const { return m[0][0] + m[1][1]; }
    double frobenius() const {
        return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] +
                         m[1][1] * m[1][1]);
    }

    friend constexpr Vec2 operator*(const Mat2& a, Vec2 v) {
        return {a.m[0][0] * v.x + a.m[0][1] * v.y, a.m[1][0] * v.x + a.m[1][1] * v.y};
    }
};

/// Closed axis-aligned rectangle.
struct Box {
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;

    bool contains(Point2 p, double margin = 0.0) const {
        return p.x >= xmin + margin && p.x <= xmax - margin && p.y >= ymin + margin &&
               p.y <= ymax - margin;
    }
    bool contains(const Box& inner) const {
        return inner.xmin >= xmin && inner.xmax <= xmax && inner.ymin >= ymin &&
               inner.ymax <= ymax;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diameter() const { return std::hypot(width(), height()); }
    Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

/// Uniform node grid over a rectangle: nodes (xmin + i*hx, ymin + j*hy)
/// for i in [0, nx), j in [0, ny). Node storage order is row-major with
/// x fastest: index = j*nx + i.
class Grid2D {
public:
    Grid2D(double xmin, double xmax, double ymin, double ymax, int nx, int ny);
    Grid2D(const Box& box, int nx, int ny)
        : Grid2D(box.xmin, box.xmax, box.ymin, box.ymax, nx, ny) {}

    double xmin() const { return box_.xmin; }
    double xmax() const { return box_.xmax; }
    double ymin() const { return box_.ymin; }
    double ymax() const { return box_.ymax; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    const Box& box() const { return box_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    /// The last node on each axis is the bound itself, not a rounded sum.
    Point2 node(int i, int j) const {
        return {i == nx_ - 1 ? box_.xmax : box_.xmin + i * hx_,
                j == ny_ - 1 ? box_.ymax : box_.ymin + j * hy_};
    }
    Point2 node(std::size_t k) const {
        return node(static_cast<int>(k % nx_), static_cast<int>(k / nx_));
    }
    bool is_interior(int i, int j) const { return i > 0 && j > 0 && i < nx_ - 1 && j < ny_ - 1; }

    /// Nearest node to p, if p lies within `tol` of it.
    std::optional<std::array<int, 2>> snap(Point2 p, double tol) const;

    std::vector<Point2> nodes() const;

private:
    Box box_;
    int nx_;
    int ny_;
    double hx_;
    double hy_;
};

}  // namespace flowlab
