#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/bump.hpp"
#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

/// Time-sampled particle path with its Liouville density. Times are signed:
/// they start at 0 and move toward the terminal time (decreasing for
/// backward flows).
struct Trajectory {
    std::vector<double> times;
    std::vector<Point2> points;
    std::vector<double> densities;  // xi(0) = 1, always positive

    std::size_t size() const { return points.size(); }
    Point2 final_point() const { return points.back(); }
    double final_density() const { return densities.back(); }
};

/// Terminal state of a flow: phi_t(x0) and xi(t, x0).
struct FlowEndpoint {
    Point2 point;
    double density = 1.0;
};

/// Classical RK4 with fixed step dt on the state (x, y, log xi), with
/// d(log xi)/dt = div X. The last step is shortened to land on t; negative
/// t runs backward in time. Throws EscapeError when a stage point leaves the
/// field's domain.
Trajectory integrate_flow(const VectorField& X, Point2 x0, double t, double dt);

/// Same step sequence as integrate_flow, without storing the path. With
/// track_density false the divergence is never evaluated and density is 1.
FlowEndpoint flow_endpoint(const VectorField& X, Point2 x0, double t, double dt,
                           bool track_density = true);

/// Recomputes the densities of `traj` by integrating div X along the same
/// step sequence from its initial point.
Trajectory density_along(const VectorField& X, const Trajectory& traj);

/// Terminal points of the flow started at every grid node.
struct FlowMap {
    Grid2D grid;
    double t = 0.0;
    double dt = 0.0;
    std::vector<Point2> points;      // grid.index order
    std::vector<double> densities;   // 1 where not tracked
    std::vector<std::optional<double>> exit_times;  // set for escaped nodes

    bool escaped(int i, int j) const { return exit_times[grid.index(i, j)].has_value(); }
    std::size_t escaped_count() const;
};

/// Independent trajectories from each node; escapes are recorded per node.
FlowMap flow_map(const VectorField& X, const Grid2D& grid, double t, double dt,
                 bool track_density = true);

/// Central-difference Jacobian of the terminal points with respect to the
/// initial node. Throws DomainError at boundary nodes or next to escapes.
Mat2 flow_jacobian_fd(const FlowMap& fm, int i, int j);
double jacobian_det_fd(const FlowMap& fm, int i, int j);

/// max over interior nodes of max(det, 1/det).
double compressibility_estimate(const FlowMap& fm);

/// Bilinear interpolant of the terminal points, as a field over the grid.
VectorField flow_map_field(const FlowMap& fm, std::string name = "flow map");

struct ChangeOfVarResult {
    double lhs = 0.0;  // quadrature of psi(phi_{-t}(z))
    double rhs = 0.0;  // quadrature of psi(z) xi(t, z)
    PairingResult lhs_pairing;
    PairingResult rhs_pairing;
};

/// Both sides of the change-of-variables identity for a scalar bump.
/// xi(t, z) is the Liouville density of the forward flow from z, which
/// equals det D(phi_t)(z).
ChangeOfVarResult change_of_var_check(const VectorField& X, double t, const BumpTestFn& psi,
                                      const Quadrature& q, double dt);

struct StabilityRow {
    double eps = 0.0;
    double mean_distance = 0.0;
    double max_distance = 0.0;
    std::size_t escaped = 0;
};

/// For each eps, mean terminal distance between the flow maps of
/// mollify(X, eps, grid) and X over the grid nodes.
std::vector<StabilityRow> stability_check(const VectorField& X, const std::vector<double>& eps_list,
                                          double t, const Grid2D& grid, double dt);

struct GradientDiagnostic {
    double lp_norm = 0.0;        // (sum |D phi|_F^p hx hy)^(1/p)
    double min_node_norm = 0.0;
    double max_node_norm = 0.0;
    std::size_t nodes = 0;
};

/// Discrete L^p norm of the Frobenius norm of the flow-map Jacobian over
/// interior nodes accepted by `region`.
GradientDiagnostic flow_gradient_diagnostic(const FlowMap& fm,
                                            const std::function<bool(Point2)>& region, double p);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_flow_map_csv(const std::string& path, const FlowMap& fm);

}  // namespace flowlab
