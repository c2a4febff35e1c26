#include "flowlab/bump.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flowlab/errors.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

BumpTestFn BumpTestFn::scalar(Point2 center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw PreconditionError("bump radius must be positive");
    return BumpTestFn{center, radius, std::nullopt};
}

BumpTestFn BumpTestFn::vector(Point2 center, double radius, Vec2 direction) {
    BumpTestFn b = scalar(center, radius);
    const double n = norm(direction);
    if (!(n > 0.0) || !std::isfinite(n)) throw PreconditionError("bump direction must be nonzero");
    b.direction = direction / n;
    return b;
}

double BumpTestFn::profile(Point2 z) const {
    const Vec2 d = z - center;
    const double q = 1.0 - dot(d, d) / (radius * radius);
    return q > 0.0 ? q * q * q : 0.0;
}

Vec2 BumpTestFn::gradient(Point2 z) const {
    const Vec2 d = z - center;
    const double r2 = radius * radius;
    const double q = 1.0 - dot(d, d) / r2;
    if (q <= 0.0) return {};
    return (-6.0 / r2) * q * q * d;
}

const Vec2& BumpTestFn::dir() const {
    if (!direction) throw PreconditionError("vector pairing requires a directed bump");
    return *direction;
}

Vec2 BumpTestFn::value(Point2 z) const { return profile(z) * dir(); }

Box BumpTestFn::support_box() const {
    return {center.x - radius, center.x + radius, center.y - radius, center.y + radius};
}

double BumpTestFn::mass() const { return std::numbers::pi * radius * radius / 4.0; }

namespace {

double midpoint_sum(const Box& box, int n, const std::function<double(Point2)>& f) {
    const double hx = box.width() / n;
    const double hy = box.height() / n;
    std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
    parallel_for(rows.size(), [&](std::size_t j) {
        const double y = box.ymin + (static_cast<double>(j) + 0.5) * hy;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += f({box.xmin + (i + 0.5) * hx, y});
        rows[j] = acc;
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return total * hx * hy;
}

}  // namespace

PairingResult integrate_box(const Box& box, int cells, const std::function<double(Point2)>& f) {
    if (cells < 4) throw PreconditionError("quadrature needs at least 4 cells per side");
    const int coarse = cells / 2;
    const double fine_value = midpoint_sum(box, cells, f);
    const double coarse_value = midpoint_sum(box, coarse, f);
    const double ratio = static_cast<double>(cells) / coarse;
    return {fine_value, cells, std::abs(fine_value - coarse_value) / (ratio * ratio - 1.0)};
}

PairingResult integrate_bump(const BumpTestFn& psi, const Quadrature& q,
                             const std::function<double(Point2)>& f) {
    if (q.cells < 4) throw PreconditionError("quadrature needs at least 4 cells per side");
    const Box box = psi.support_box();
    if (!q.domain.contains(box))
        throw DomainError("bump support [" + std::to_string(box.xmin) + ", " +
                          std::to_string(box.xmax) + "] x [" + std::to_string(box.ymin) + ", " +
                          std::to_string(box.ymax) + "] exceeds the quadrature domain");
    return integrate_box(box, q.cells, f);
}

std::vector<BumpTestFn> bump_family(double offset, double radius) {
    std::vector<BumpTestFn> out;
    for (double cy : {-offset, offset})
        for (double cx : {-offset, offset})
            for (Vec2 d : {Vec2{1, 0}, Vec2{0, 1}}) out.push_back(BumpTestFn::vector({cx, cy}, radius, d));
    return out;
}

}  // namespace flowlab
