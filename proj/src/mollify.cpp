#include "flowlab/mollify.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/errors.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

double mollifier_profile(Vec2 z, double eps) {
    const double q = 1.0 - dot(z, z) / (eps * eps);
    return q > 0.0 ? q * q * q : 0.0;
}

VectorField mollify(const VectorField& X, double eps, const Grid2D& grid) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw PreconditionError("mollification scale must be positive");
    if (grid.hx() > 0.5 * eps || grid.hy() > 0.5 * eps)
        throw ResolutionError("grid spacing (" + std::to_string(grid.hx()) + ", " +
                              std::to_string(grid.hy()) + ") does not resolve eps = " +
                              std::to_string(eps) + "; need spacing <= eps/2");

    struct Tap {
        int di, dj;
        double w;
    };
    const int ki = static_cast<int>(std::ceil(eps / grid.hx()));
    const int kj = static_cast<int>(std::ceil(eps / grid.hy()));
    std::vector<Tap> taps;
    for (int dj = -kj; dj <= kj; ++dj)
        for (int di = -ki; di <= ki; ++di) {
            const double w = mollifier_profile({di * grid.hx(), dj * grid.hy()}, eps);
            if (w > 0.0) taps.push_back({di, dj, w});
        }

    // Source values on the lattice extended by the kernel radius.
    const int ex = grid.nx() + 2 * ki;
    const int ey = grid.ny() + 2 * kj;
    std::vector<std::optional<Vec2>> src(static_cast<std::size_t>(ex) * ey);
    parallel_for(static_cast<std::size_t>(ey), [&](std::size_t row) {
        const int j = static_cast<int>(row) - kj;
        for (int i = -ki; i < grid.nx() + ki; ++i) {
            Point2 p;
            if (i >= 0 && i < grid.nx() && j >= 0 && j < grid.ny())
                p = grid.node(i, j);
            else
                p = {grid.xmin() + i * grid.hx(), grid.ymin() + j * grid.hy()};
            if (!X.contains(p)) continue;
            try {
                src[row * ex + static_cast<std::size_t>(i + ki)] = X(p);
            } catch (const DomainError&) {
            }
        }
    });

    std::vector<Vec2> out(grid.size());
    parallel_for(static_cast<std::size_t>(grid.ny()), [&](std::size_t row) {
        const int j = static_cast<int>(row);
        for (int i = 0; i < grid.nx(); ++i) {
            Vec2 acc;
            double wsum = 0.0;
            for (const Tap& t : taps) {
                const auto& v = src[static_cast<std::size_t>(j - t.dj + kj) * ex + (i - t.di + ki)];
                if (!v) continue;
                acc += t.w * *v;
                wsum += t.w;
            }
            if (wsum == 0.0)
                throw DomainError("mollifier support around node has no evaluable points");
            out[grid.index(i, j)] = acc / wsum;
        }
    });

    VectorField::Options opts;
    opts.divergence_free = X.declared_divergence_free();
    return VectorField::sampled(grid, std::move(out), X.name() + "*rho_" + std::to_string(eps),
                                std::move(opts));
}

double l1_distance(const VectorField& A, const VectorField& B, const Grid2D& grid, double margin) {
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point2 p = grid.node(k);
        if (!grid.box().contains(p, margin)) continue;
        sum += norm(A(p) - B(p));
    }
    return sum * grid.hx() * grid.hy();
}

}  // namespace flowlab
