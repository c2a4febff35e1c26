#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowlab/field.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

struct HamiltonianResult {
    ScalarField H;
    /// Max over grid edges of |edge difference of perp-gradient of H minus the
    /// trapezoid average of X along that edge|. Zero exactly when the
    /// trapezoid fluxes of X balance on every cell.
    double residual = 0.0;
    /// Max over interior nodes of |central-difference perp-gradient of H - X|;
    /// carries an O(h^2) truncation floor even for exact Hamiltonians.
    double pointwise_residual = 0.0;
    Point2 worst_edge_midpoint;
};

/// H with H(base) = 0 and X = perp-gradient of H, by trapezoid integration
/// of X_2 dx along the base row followed by -X_1 dy up and down each column.
/// `base` must be a grid node. Throws ModelError when the residual exceeds
/// tolerance * max(1, max |X|).
HamiltonianResult reconstruct_hamiltonian(const VectorField& X, const Grid2D& grid, Point2 base,
                                          double tolerance = 1e-5);

/// Closed polyline with arc length. vertices.front() == vertices.back().
struct LevelCurve {
    double level = 0.0;
    std::vector<Point2> vertices;
    std::vector<double> arclength;  // arclength[0] = 0, strictly increasing
    double length = 0.0;
    /// +1 for counterclockwise traversal, -1 for clockwise.
    int orientation = 1;

    /// Point at arc-length position s in [0, length].
    Point2 at(double s) const;
    /// No two non-adjacent segments intersect.
    bool is_simple() const;
    double signed_area() const;
};

struct LevelSetDecomposition {
    double level = 0.0;
    /// Level actually contoured after the exact-hit perturbation.
    double contoured_level = 0.0;
    std::vector<LevelCurve> curves;
    std::size_t discarded_open_chains = 0;
    /// min |X| over all curve vertices; set when a field is supplied.
    std::optional<double> min_speed;
};

/// Marching squares on the node samples of H. Curves are oriented with the
/// higher values of H on the right, which is the direction of perp-grad H;
/// when X is supplied they are oriented along X instead. Saddle cells are
/// split by the cell-average rule. Boundary-touching chains are dropped.
LevelSetDecomposition extract_level_set(const ScalarField& H, double h, const Grid2D& grid,
                                        const VectorField* X = nullptr);

double min_speed_on_curve(const VectorField& X, const LevelCurve& curve);

enum class SingularPolicy {
    Throw,     // SingularError when the speed vanishes on the curve
    Identity,  // return x0, the identity map on singular level sets
};

struct LevelSetFlowOptions {
    /// Max distance from x0 to the curve; default is the longest segment.
    std::optional<double> snap_tolerance;
    /// Curves with min speed at or below this are singular.
    double speed_tolerance = 1e-9;
    SingularPolicy singular = SingularPolicy::Throw;
};

/// Time to traverse the curve once: trapezoid integral of ds / |X|.
double period(const VectorField& X, const LevelCurve& curve);

/// Moves x0 along the curve, in the direction of X, for time t using the
/// one-dimensional reduction t = N * period + integral of ds / |X|.
Point2 level_set_flow(const VectorField& X, const LevelCurve& curve, Point2 x0, double t,
                      const LevelSetFlowOptions& opts = {});

/// max_k |H(traj.points[k]) - H(traj.points[0])|.
double hamiltonian_conservation(const ScalarField& H, const Trajectory& traj);

void write_curve_csv(const std::string& path, const LevelCurve& curve);

}  // namespace flowlab
