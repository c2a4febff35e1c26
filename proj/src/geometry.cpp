#include "flowlab/geometry.hpp"

#include <string>

#include "flowlab/errors.hpp"

namespace flowlab {

Grid2D::Grid2D(double xmin, double xmax, double ymin, double ymax, int nx, int ny)
    : box_{xmin, xmax, ymin, ymax}, nx_(nx), ny_(ny) {
    if (!(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) &&
          std::isfinite(ymax))) {
        throw DomainError("grid bounds must be finite");
    }
    if (!(xmax > xmin) || !(ymax > ymin)) {
        throw DomainError("grid requires xmax > xmin and ymax > ymin");
    }
    if (nx < 2 || ny < 2) {
        throw DomainError("grid requires at least 2 nodes per axis, got " + std::to_string(nx) +
                          "x" + std::to_string(ny));
    }
    hx_ = (xmax - xmin) / (nx - 1);
    hy_ = (ymax - ymin) / (ny - 1);
}

std::optional<std::array<int, 2>> Grid2D::snap(Point2 p, double tol) const {
    const int i = static_cast<int>(std::lround((p.x - box_.xmin) / hx_));
    const int j = static_cast<int>(std::lround((p.y - box_.ymin) / hy_));
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
    if (distance(node(i, j), p) > tol) return std::nullopt;
    return std::array<int, 2>{i, j};
}

std::vector<Point2> Grid2D::nodes() const {
    std::vector<Point2> out;
    out.reserve(size());
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) out.push_back(node(i, j));
    return out;
}

}  // namespace flowlab
