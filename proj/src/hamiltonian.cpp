#include "flowlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/field_io.hpp"

namespace flowlab {

namespace {

std::string describe(Point2 p) {
    std::ostringstream os;
    os.precision(10);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Hamiltonian reconstruction

HamiltonianResult reconstruct_hamiltonian(const VectorField& X, const Grid2D& grid, Point2 base,
                                          double tolerance) {
    const auto snapped = grid.snap(base, 1e-9 * grid.box().diameter());
    if (!snapped) throw PreconditionError("Hamiltonian base point " + describe(base) + " is not a grid node");
    const int i0 = (*snapped)[0];
    const int j0 = (*snapped)[1];
    const int nx = grid.nx();
    const int ny = grid.ny();
    const std::vector<Vec2> V = sample_nodes(X, grid);
    const auto at = [&](int i, int j) { return V[grid.index(i, j)]; };
    const auto dx = [&](int i) { return grid.node(i + 1, 0).x - grid.node(i, 0).x; };
    const auto dy = [&](int j) { return grid.node(0, j + 1).y - grid.node(0, j).y; };

    std::vector<double> H(grid.size(), 0.0);
    auto h = [&](int i, int j) -> double& { return H[grid.index(i, j)]; };
    for (int i = i0 + 1; i < nx; ++i) h(i, j0) = h(i - 1, j0) + dx(i - 1) * 0.5 * (at(i - 1, j0).y + at(i, j0).y);
    for (int i = i0 - 1; i >= 0; --i) h(i, j0) = h(i + 1, j0) - dx(i) * 0.5 * (at(i, j0).y + at(i + 1, j0).y);
    for (int i = 0; i < nx; ++i) {
        for (int j = j0 + 1; j < ny; ++j) h(i, j) = h(i, j - 1) - dy(j - 1) * 0.5 * (at(i, j - 1).x + at(i, j).x);
        for (int j = j0 - 1; j >= 0; --j) h(i, j) = h(i, j + 1) + dy(j) * 0.5 * (at(i, j).x + at(i, j + 1).x);
    }

    HamiltonianResult out{ScalarField::sampled(grid, H, "H[" + X.name() + "]"), 0.0, 0.0, {}};
    double vmax = 0.0;
    for (const Vec2& v : V) vmax = std::max(vmax, norm(v));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (i + 1 < nx) {
                const double r = std::abs((h(i + 1, j) - h(i, j)) / dx(i) - 0.5 * (at(i, j).y + at(i + 1, j).y));
                if (r > out.residual) {
                    out.residual = r;
                    out.worst_edge_midpoint = 0.5 * (grid.node(i, j) + grid.node(i + 1, j));
                }
            }
            if (j + 1 < ny) {
                const double r = std::abs(-(h(i, j + 1) - h(i, j)) / dy(j) - 0.5 * (at(i, j).x + at(i, j + 1).x));
                if (r > out.residual) {
                    out.residual = r;
                    out.worst_edge_midpoint = 0.5 * (grid.node(i, j) + grid.node(i, j + 1));
                }
            }
            if (grid.is_interior(i, j)) {
                const Vec2 perp_grad{-(h(i, j + 1) - h(i, j - 1)) / (dy(j) + dy(j - 1)),
                                     (h(i + 1, j) - h(i - 1, j)) / (dx(i) + dx(i - 1))};
                out.pointwise_residual = std::max(out.pointwise_residual, norm(perp_grad - at(i, j)));
            }
        }
    if (out.residual > tolerance * std::max(1.0, vmax)) {
        std::ostringstream os;
        os.precision(6);
        os << "field '" << X.name() << "' is not divergence-free on the grid: Hamiltonian residual "
           << out.residual << " at the edge centered " << describe(out.worst_edge_midpoint)
           << " exceeds " << tolerance * std::max(1.0, vmax);
        throw ModelError(os.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level curves

Point2 LevelCurve::at(double s) const {
    if (vertices.size() < 2) throw PreconditionError("degenerate level curve");
    s = std::clamp(s, 0.0, length);
    auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
    std::size_t k = static_cast<std::size_t>(it - arclength.begin());
    k = std::clamp<std::size_t>(k, 1, vertices.size() - 1) - 1;
    const double L = arclength[k + 1] - arclength[k];
    const double lam = L > 0.0 ? (s - arclength[k]) / L : 0.0;
    return vertices[k] + lam * (vertices[k + 1] - vertices[k]);
}

double LevelCurve::signed_area() const {
    double a = 0.0;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) a += cross(vertices[k], vertices[k + 1]);
    return 0.5 * a;
}

namespace {

int orient(Point2 a, Point2 b, Point2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

}  // namespace

bool LevelCurve::is_simple() const {
    const std::size_t n = vertices.size() - 1;  // segment count
    if (n < 3) return false;
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    const auto lo = [&](std::size_t k) { return std::min(vertices[k].x, vertices[k + 1].x); };
    const auto hi = [&](std::size_t k) { return std::max(vertices[k].x, vertices[k + 1].x); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lo(a) < lo(b); });
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t s = order[a];
        for (std::size_t b = a + 1; b < n && lo(order[b]) <= hi(s); ++b) {
            const std::size_t t = order[b];
            const std::size_t gap = s > t ? s - t : t - s;
            if (gap == 1 || gap == n - 1) continue;  // neighbours share a vertex
            if (segments_intersect(vertices[s], vertices[s + 1], vertices[t], vertices[t + 1])) return false;
        }
    }
    return true;
}

namespace {

void finish_curve(LevelCurve& c) {
    c.arclength.assign(1, 0.0);
    for (std::size_t k = 1; k < c.vertices.size(); ++k)
        c.arclength.push_back(c.arclength.back() + distance(c.vertices[k - 1], c.vertices[k]));
    c.length = c.arclength.back();
    c.orientation = c.signed_area() >= 0.0 ? 1 : -1;
}

LevelCurve reversed(const LevelCurve& c) {
    LevelCurve r = c;
    std::reverse(r.vertices.begin(), r.vertices.end());
    finish_curve(r);
    return r;
}

double along_field(const VectorField& X, const LevelCurve& c) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
        s += dot(c.vertices[k + 1] - c.vertices[k], X(0.5 * (c.vertices[k] + c.vertices[k + 1])));
    return s;
}

struct Segment {
    std::size_t from;
    std::size_t to;
};

}  // namespace

LevelSetDecomposition extract_level_set(const ScalarField& H, double h, const Grid2D& grid,
                                        const VectorField* X) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    std::vector<double> v;
    if (const auto* s = H.samples();
        s && s->grid.nx() == nx && s->grid.ny() == ny && s->grid.box().xmin == grid.xmin() &&
        s->grid.box().xmax == grid.xmax() && s->grid.box().ymin == grid.ymin() &&
        s->grid.box().ymax == grid.ymax()) {
        v = s->values;
    } else {
        v = sample_nodes(H, grid);
    }

    LevelSetDecomposition out;
    out.level = h;
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double range = *mx - *mn;
    double level = h;
    const double bump = 1e-12 * (range > 0.0 ? range : std::max(1.0, std::abs(h)));
    for (int tries = 0; std::find(v.begin(), v.end(), level) != v.end(); ++tries) {
        if (tries == 16) throw PreconditionError("level value keeps colliding with node values");
        level += bump;
    }
    out.contoured_level = level;
    for (double& x : v) x -= level;
    const auto f = [&](int i, int j) { return v[grid.index(i, j)]; };

    // Edge ids: horizontal edges first, then vertical.
    const std::size_t n_horizontal = static_cast<std::size_t>(nx - 1) * ny;
    const auto hedge = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx - 1) + i; };
    const auto vedge = [&](int i, int j) { return n_horizontal + static_cast<std::size_t>(j) * nx + i; };
    const auto crossing = [&](std::size_t e) {
        int i0, j0, i1, j1;
        if (e < n_horizontal) {
            i0 = static_cast<int>(e % (nx - 1));
            j0 = static_cast<int>(e / (nx - 1));
            i1 = i0 + 1;
            j1 = j0;
        } else {
            i0 = static_cast<int>((e - n_horizontal) % nx);
            j0 = static_cast<int>((e - n_horizontal) / nx);
            i1 = i0;
            j1 = j0 + 1;
        }
        const double f0 = f(i0, j0);
        const double f1 = f(i1, j1);
        const double lam = f0 / (f0 - f1);
        const Point2 a = grid.node(i0, j0);
        return a + lam * (grid.node(i1, j1) - a);
    };

    const std::size_t n_edges = n_horizontal + static_cast<std::size_t>(nx) * (ny - 1);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<Segment> segs;
    std::vector<std::size_t> out_seg(n_edges, none);
    std::vector<char> has_in(n_edges, 0);

    // Adds a segment between edges a and b, oriented so that the corners with
    // positive weight lie on its right.
    const auto add = [&](std::size_t a, std::size_t b, const Point2* corners, const double* weight, int count) {
        const Point2 P = crossing(a);
        const Point2 Q = crossing(b);
        double s = 0.0;
        for (int k = 0; k < count; ++k) s += weight[k] * cross(Q - P, corners[k] - P);
        if (s > 0.0) std::swap(a, b);
        segs.push_back({a, b});
        out_seg[a] = segs.size() - 1;
        has_in[b] = 1;
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const Point2 c[4] = {grid.node(i, j), grid.node(i + 1, j), grid.node(i + 1, j + 1), grid.node(i, j + 1)};
            const double fc[4] = {f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)};
            const std::size_t e[4] = {hedge(i, j), vedge(i + 1, j), hedge(i, j + 1), vedge(i, j)};
            int crossed[4];
            int n = 0;
            for (int k = 0; k < 4; ++k)
                if ((fc[k] > 0.0) != (fc[(k + 1) % 4] > 0.0)) crossed[n++] = k;
            if (n == 2) {
                double w[4];
                for (int k = 0; k < 4; ++k) w[k] = fc[k] > 0.0 ? 1.0 : -1.0;
                add(e[crossed[0]], e[crossed[1]], c, w, 4);
            } else if (n == 4) {
                const double mean = 0.25 * (fc[0] + fc[1] + fc[2] + fc[3]);
                // Edge k joins corners k and k+1; the pair (k-1, k) cuts off corner k.
                const bool center_like_c0 = (mean > 0.0) == (fc[0] > 0.0);
                const int cut[2] = {center_like_c0 ? 1 : 0, center_like_c0 ? 3 : 2};
                for (int corner : cut) {
                    const double w = fc[corner] > 0.0 ? 1.0 : -1.0;
                    add(e[(corner + 3) % 4], e[corner], &c[corner], &w, 1);
                }
            }
        }
    }

    std::vector<char> used(segs.size(), 0);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s] || has_in[segs[s].from]) continue;
        for (std::size_t k = s; k != none; k = out_seg[segs[k].to]) used[k] = 1;
        ++out.discarded_open_chains;
    }
    const double min_step = 1e-14 * grid.box().diameter();
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        LevelCurve curve;
        curve.level = h;
        for (std::size_t k = s; !used[k]; k = out_seg[segs[k].to]) {
            used[k] = 1;
            const Point2 p = crossing(segs[k].from);
            if (curve.vertices.empty() || distance(curve.vertices.back(), p) > min_step)
                curve.vertices.push_back(p);
            if (out_seg[segs[k].to] == none) throw PreconditionError("broken level-set chain");
        }
        if (curve.vertices.size() < 3) continue;
        if (distance(curve.vertices.back(), curve.vertices.front()) <= min_step) curve.vertices.pop_back();
        curve.vertices.push_back(curve.vertices.front());
        finish_curve(curve);
        if (X && along_field(*X, curve) < 0.0) curve = reversed(curve);
        out.curves.push_back(std::move(curve));
    }
    if (X) {
        double c = INFINITY;
        for (const auto& curve : out.curves) c = std::min(c, min_speed_on_curve(*X, curve));
        if (!out.curves.empty()) out.min_speed = c;
    }
    return out;
}

double min_speed_on_curve(const VectorField& X, const LevelCurve& curve) {
    double c = INFINITY;
    for (const Point2& p : curve.vertices) c = std::min(c, norm(X(p)));
    return c;
}

// ---------------------------------------------------------------------------
// One-dimensional level-set flow

namespace {

// Cumulative travel time T_k = integral of ds/|X| up to vertex k, with 1/|X|
// linear along each segment.
struct TimeTable {
    std::vector<double> inv_speed;
    std::vector<double> T;

    TimeTable(const VectorField& X, const LevelCurve& c) {
        for (const Point2& p : c.vertices) inv_speed.push_back(1.0 / norm(X(p)));
        T.assign(1, 0.0);
        for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k) {
            const double L = c.arclength[k + 1] - c.arclength[k];
            T.push_back(T.back() + 0.5 * L * (inv_speed[k] + inv_speed[k + 1]));
        }
    }

    double time_at(const LevelCurve& c, std::size_t k, double lam) const {
        const double L = c.arclength[k + 1] - c.arclength[k];
        return T[k] + L * (inv_speed[k] * lam + 0.5 * (inv_speed[k + 1] - inv_speed[k]) * lam * lam);
    }

    // Segment and fraction where the travel time equals tau in [0, period).
    std::pair<std::size_t, double> locate(const LevelCurve& c, double tau) const {
        auto it = std::upper_bound(T.begin(), T.end(), tau);
        std::size_t k = static_cast<std::size_t>(it - T.begin());
        k = std::clamp<std::size_t>(k, 1, T.size() - 1) - 1;
        const double L = c.arclength[k + 1] - c.arclength[k];
        const double a = 0.5 * L * (inv_speed[k + 1] - inv_speed[k]);
        const double b = L * inv_speed[k];
        const double r = tau - T[k];
        // Root of a lam^2 + b lam - r = 0 in the cancellation-free form.
        const double disc = std::max(0.0, b * b + 4.0 * a * r);
        const double lam = 2.0 * r / (b + std::sqrt(disc));
        return {k, std::clamp(lam, 0.0, 1.0)};
    }
};

}  // namespace

double period(const VectorField& X, const LevelCurve& curve) {
    const double c = min_speed_on_curve(X, curve);
    if (!(c > 0.0)) throw SingularError("field vanishes on the level curve; the period is infinite");
    return TimeTable(X, curve).T.back();
}

Point2 level_set_flow(const VectorField& X, const LevelCurve& curve_in, Point2 x0, double t,
                      const LevelSetFlowOptions& opts) {
    if (curve_in.vertices.size() < 4) throw PreconditionError("degenerate level curve");
    // Snap x0 onto the polyline.
    double best = INFINITY, max_seg = 0.0;
    std::size_t seg = 0;
    double lam0 = 0.0;
    for (std::size_t k = 0; k + 1 < curve_in.vertices.size(); ++k) {
        const Point2 a = curve_in.vertices[k];
        const Vec2 d = curve_in.vertices[k + 1] - a;
        const double L2 = dot(d, d);
        max_seg = std::max(max_seg, std::sqrt(L2));
        const double lam = L2 > 0.0 ? std::clamp(dot(x0 - a, d) / L2, 0.0, 1.0) : 0.0;
        const double dist = distance(a + lam * d, x0);
        if (dist < best) {
            best = dist;
            seg = k;
            lam0 = lam;
        }
    }
    const double tol = opts.snap_tolerance.value_or(max_seg);
    if (best > tol) {
        std::ostringstream os;
        os << "point " << describe(x0) << " is " << best << " from the level curve (tolerance " << tol << ")";
        throw SnapError(os.str());
    }
    if (t == 0.0) return x0;

    const double speed = min_speed_on_curve(X, curve_in);
    if (speed <= opts.speed_tolerance) {
        if (opts.singular == SingularPolicy::Identity) return x0;
        std::ostringstream os;
        os << "min speed " << speed << " on the level curve is at or below " << opts.speed_tolerance;
        throw SingularError(os.str());
    }

    LevelCurve curve = curve_in;
    if (along_field(X, curve) < 0.0) {
        curve = reversed(curve_in);
        const std::size_t n = curve.vertices.size() - 1;
        seg = n - 1 - seg;
        lam0 = 1.0 - lam0;
    }
    const TimeTable table(X, curve);
    const double P = table.T.back();
    double tau = table.time_at(curve, seg, lam0) + t;
    tau -= P * std::floor(tau / P);
    if (tau >= P) tau = 0.0;
    const auto [k, lam] = table.locate(curve, tau);
    return curve.vertices[k] + lam * (curve.vertices[k + 1] - curve.vertices[k]);
}

double hamiltonian_conservation(const ScalarField& H, const Trajectory& traj) {
    if (traj.points.empty()) return 0.0;
    const double h0 = H(traj.points.front());
    double drift = 0.0;
    for (const Point2& p : traj.points) drift = std::max(drift, std::abs(H(p) - h0));
    return drift;
}

void write_curve_csv(const std::string& path, const LevelCurve& curve) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "s,x,y\n";
    for (std::size_t k = 0; k < curve.vertices.size(); ++k)
        out << format_double(curve.arclength[k]) << ',' << format_double(curve.vertices[k].x) << ','
            << format_double(curve.vertices[k].y) << '\n';
}

}  // namespace flowlab
