#include "flowlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "flowlab/calculus.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/field_io.hpp"
#include "flowlab/mollify.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

namespace {

struct State {
    Point2 p;
    double log_xi = 0.0;
};

class Stepper {
public:
    Stepper(const VectorField& X, bool track) : X_(X), track_(track), h_(fd_step(X)) {}

    // One RK4 step of size h starting at time `time`.
    State step(const State& s, double h, double time) const {
        const auto k1 = rhs(s.p, time);
        const auto k2 = rhs(s.p + 0.5 * h * k1.v, time);
        const auto k3 = rhs(s.p + 0.5 * h * k2.v, time);
        const auto k4 = rhs(s.p + h * k3.v, time);
        State out;
        out.p = s.p + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        out.log_xi = s.log_xi + (h / 6.0) * (k1.div + 2.0 * k2.div + 2.0 * k3.div + k4.div);
        if (!X_.contains(out.p)) escape(out.p, time + h);
        return out;
    }

private:
    struct Deriv {
        Vec2 v;
        double div = 0.0;
    };

    [[noreturn]] void escape(Point2 p, double time) const {
        std::ostringstream os;
        os.precision(17);
        os << "trajectory left the domain of '" << X_.name() << "' at (" << p.x << ", " << p.y
           << ") near t = " << time;
        throw EscapeError(os.str(), time);
    }

    Deriv rhs(Point2 p, double time) const {
        if (!X_.contains(p)) escape(p, time);
        try {
            Deriv d{X_(p), 0.0};
            if (track_) d.div = divergence(X_, p, h_);
            return d;
        } catch (const DomainError&) {
            escape(p, time);
        }
    }

    const VectorField& X_;
    bool track_;
    double h_;
};

void validate(double t, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
    if (!std::isfinite(t)) throw PreconditionError("flow time must be finite");
    if (std::abs(t) / dt > 1e7) throw PreconditionError("more than 1e7 steps requested");
}

// Signed step sizes: full steps of dt, the last one shortened to land on t.
std::vector<double> step_sizes(double t, double dt) {
    std::vector<double> out;
    if (t == 0.0) return out;
    const double T = std::abs(t);
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt * (1.0 - 1e-12))));
    const double sign = t > 0.0 ? 1.0 : -1.0;
    out.assign(n, sign * dt);
    out.back() = sign * (T - static_cast<double>(n - 1) * dt);
    return out;
}

template <typename Record>
State run(const VectorField& X, Point2 x0, const std::vector<double>& steps, bool track,
          Record&& record) {
    Stepper stepper(X, track);
    if (!X.contains(x0)) throw EscapeError("initial point outside the domain of '" + X.name() + "'", 0.0);
    State s{x0, 0.0};
    double time = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        s = stepper.step(s, steps[k], time);
        time += steps[k];
        record(k, s);
    }
    return s;
}

}  // namespace

Trajectory integrate_flow(const VectorField& X, Point2 x0, double t, double dt) {
    validate(t, dt);
    const auto steps = step_sizes(t, dt);
    Trajectory traj;
    traj.times.reserve(steps.size() + 1);
    traj.points.reserve(steps.size() + 1);
    traj.densities.reserve(steps.size() + 1);
    traj.times.push_back(0.0);
    traj.points.push_back(x0);
    traj.densities.push_back(1.0);
    double time = 0.0;
    run(X, x0, steps, true, [&](std::size_t k, const State& s) {
        time += steps[k];
        traj.times.push_back(k + 1 == steps.size() ? t : time);
        traj.points.push_back(s.p);
        traj.densities.push_back(std::exp(s.log_xi));
    });
    return traj;
}

FlowEndpoint flow_endpoint(const VectorField& X, Point2 x0, double t, double dt, bool track_density) {
    validate(t, dt);
    const State s = run(X, x0, step_sizes(t, dt), track_density, [](std::size_t, const State&) {});
    return {s.p, std::exp(s.log_xi)};
}

Trajectory density_along(const VectorField& X, const Trajectory& traj) {
    if (traj.points.empty()) throw PreconditionError("empty trajectory");
    std::vector<double> steps;
    for (std::size_t k = 1; k < traj.times.size(); ++k) steps.push_back(traj.times[k] - traj.times[k - 1]);
    Trajectory out = traj;
    out.densities.assign(traj.points.size(), 1.0);
    run(X, traj.points.front(), steps, true,
        [&](std::size_t k, const State& s) { out.densities[k + 1] = std::exp(s.log_xi); });
    return out;
}

std::size_t FlowMap::escaped_count() const {
    return static_cast<std::size_t>(
        std::count_if(exit_times.begin(), exit_times.end(), [](const auto& e) { return e.has_value(); }));
}

FlowMap flow_map(const VectorField& X, const Grid2D& grid, double t, double dt, bool track_density) {
    validate(t, dt);
    const auto steps = step_sizes(t, dt);
    FlowMap fm{grid, t, dt, std::vector<Point2>(grid.size()), std::vector<double>(grid.size(), 1.0),
               std::vector<std::optional<double>>(grid.size())};
    parallel_for(grid.size(), [&](std::size_t k) {
        const Point2 x0 = grid.node(k);
        try {
            const State s = run(X, x0, steps, track_density, [](std::size_t, const State&) {});
            fm.points[k] = s.p;
            fm.densities[k] = std::exp(s.log_xi);
        } catch (const EscapeError& e) {
            fm.points[k] = x0;
            fm.exit_times[k] = e.exit_time();
        }
    });
    return fm;
}

Mat2 flow_jacobian_fd(const FlowMap& fm, int i, int j) {
    const Grid2D& g = fm.grid;
    if (!g.is_interior(i, j))
        throw DomainError("flow-map Jacobian needs an interior node, got (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
    if (fm.escaped(i - 1, j) || fm.escaped(i + 1, j) || fm.escaped(i, j - 1) || fm.escaped(i, j + 1))
        throw DomainError("flow-map Jacobian stencil touches an escaped trajectory");
    const auto P = [&](int a, int b) { return fm.points[g.index(a, b)]; };
    const Vec2 dx = (P(i + 1, j) - P(i - 1, j)) / (g.node(i + 1, j).x - g.node(i - 1, j).x);
    const Vec2 dy = (P(i, j + 1) - P(i, j - 1)) / (g.node(i, j + 1).y - g.node(i, j - 1).y);
    return Mat2::from_columns(dx, dy);
}

double jacobian_det_fd(const FlowMap& fm, int i, int j) { return flow_jacobian_fd(fm, i, j).det(); }

double compressibility_estimate(const FlowMap& fm) {
    double C = 1.0;
    bool any = false;
    for (int j = 1; j < fm.grid.ny() - 1; ++j)
        for (int i = 1; i < fm.grid.nx() - 1; ++i) {
            if (fm.escaped(i - 1, j) || fm.escaped(i + 1, j) || fm.escaped(i, j - 1) ||
                fm.escaped(i, j + 1))
                continue;
            const double d = jacobian_det_fd(fm, i, j);
            if (!(d > 0.0)) throw SingularError("flow-map Jacobian determinant is not positive");
            C = std::max({C, d, 1.0 / d});
            any = true;
        }
    if (!any) throw InconclusiveError("no interior node with a complete stencil");
    return C;
}

VectorField flow_map_field(const FlowMap& fm, std::string name) {
    if (fm.escaped_count() > 0)
        throw DomainError("flow map has escaped nodes; it cannot be interpolated");
    return VectorField::sampled(fm.grid, fm.points, std::move(name));
}

ChangeOfVarResult change_of_var_check(const VectorField& X, double t, const BumpTestFn& psi,
                                      const Quadrature& q, double dt) {
    ChangeOfVarResult r;
    // psi o phi_{-t} is supported on phi_t(supp psi); bound it by flowing the
    // support circle forward.
    Box image = psi.support_box();
    if (t != 0.0) {
        constexpr int n = 256;
        image = Box{INFINITY, -INFINITY, INFINITY, -INFINITY};
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * k / n;
            const Point2 e = flow_endpoint(X, psi.center + psi.radius * Vec2{std::cos(a), std::sin(a)}, t, dt,
                                           false).point;
            image = Box{std::min(image.xmin, e.x), std::max(image.xmax, e.x), std::min(image.ymin, e.y),
                        std::max(image.ymax, e.y)};
        }
        const double pad = 0.05 * std::max(image.width(), image.height());
        image = Box{image.xmin - pad, image.xmax + pad, image.ymin - pad, image.ymax + pad};
        if (!q.domain.contains(image))
            throw DomainError("the image of the bump support under the flow leaves the quadrature domain");
    }
    r.lhs_pairing = integrate_box(image, q.cells, [&](Point2 z) {
        if (t == 0.0) return psi.profile(z);
        return psi.profile(flow_endpoint(X, z, -t, dt, false).point);
    });
    r.rhs_pairing = integrate_bump(psi, q, [&](Point2 z) {
        const double p = psi.profile(z);
        if (p == 0.0 || t == 0.0) return p;
        return p * flow_endpoint(X, z, t, dt, true).density;
    });
    r.lhs = r.lhs_pairing.value;
    r.rhs = r.rhs_pairing.value;
    return r;
}

std::vector<StabilityRow> stability_check(const VectorField& X, const std::vector<double>& eps_list,
                                          double t, const Grid2D& grid, double dt) {
    for (std::size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1]))
            throw PreconditionError("stability study expects strictly decreasing eps");
    const FlowMap reference = flow_map(X, grid, t, dt, false);
    std::vector<StabilityRow> rows;
    for (double eps : eps_list) {
        const VectorField M = mollify(X, eps, grid);
        const FlowMap fm = flow_map(M, grid, t, dt, false);
        StabilityRow row{eps, 0.0, 0.0, 0};
        std::size_t used = 0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (fm.exit_times[k] || reference.exit_times[k]) {
                ++row.escaped;
                continue;
            }
            const double d = distance(fm.points[k], reference.points[k]);
            row.mean_distance += d;
            row.max_distance = std::max(row.max_distance, d);
            ++used;
        }
        if (used == 0) throw InconclusiveError("every trajectory escaped in the stability study");
        row.mean_distance /= static_cast<double>(used);
        rows.push_back(row);
    }
    return rows;
}

GradientDiagnostic flow_gradient_diagnostic(const FlowMap& fm,
                                            const std::function<bool(Point2)>& region, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("L^p exponent must be finite and >= 1");
    GradientDiagnostic out;
    out.min_node_norm = INFINITY;
    double acc = 0.0;
    for (int j = 1; j < fm.grid.ny() - 1; ++j)
        for (int i = 1; i < fm.grid.nx() - 1; ++i) {
            if (!region(fm.grid.node(i, j))) continue;
            const double n = flow_jacobian_fd(fm, i, j).frobenius();
            acc += std::pow(n, p);
            out.min_node_norm = std::min(out.min_node_norm, n);
            out.max_node_norm = std::max(out.max_node_norm, n);
            ++out.nodes;
        }
    if (out.nodes == 0) throw DomainError("gradient diagnostic region contains no interior node");
    out.lp_norm = std::pow(acc * fm.grid.hx() * fm.grid.hy(), 1.0 / p);
    return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "t,x,y,xi\n";
    for (std::size_t k = 0; k < traj.size(); ++k)
        out << format_double(traj.times[k]) << ',' << format_double(traj.points[k].x) << ','
            << format_double(traj.points[k].y) << ',' << format_double(traj.densities[k]) << '\n';
}

void write_flow_map_csv(const std::string& path, const FlowMap& fm) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "x0,y0,x1,y1,xi\n";
    for (std::size_t k = 0; k < fm.grid.size(); ++k) {
        if (fm.exit_times[k]) continue;
        const Point2 a = fm.grid.node(k);
        out << format_double(a.x) << ',' << format_double(a.y) << ',' << format_double(fm.points[k].x)
            << ',' << format_double(fm.points[k].y) << ',' << format_double(fm.densities[k]) << '\n';
    }
}

}  // namespace flowlab
