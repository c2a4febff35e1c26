#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowlab/bump.hpp"
#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

enum class Verdict { Commuting, NotCommuting, Gap };
const char* to_string(Verdict v);
/// Accepts "commuting" and "not-commuting".
std::optional<Verdict> parse_expectation(const std::string& s);

enum class CheckStatus { Pass, Fail, Inconclusive, Skipped };
const char* to_string(CheckStatus s);

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Skipped;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct Discrepancy {
    double mean = 0.0;
    double max = 0.0;
    std::size_t escaped = 0;
    std::size_t samples = 0;  // samples that stayed in the domain
};

/// |phi_t^X(phi_s^Y(z)) - phi_s^Y(phi_t^X(z))| over the sample nodes.
/// Escaped samples are excluded and counted; more than half escaping
/// throws InconclusiveError.
Discrepancy commutator_discrepancy(const VectorField& X, const VectorField& Y, double t, double s,
                                   const Grid2D& samples, double dt);

struct TransportResult {
    double max_residual = 0.0;
    std::size_t samples = 0;
    std::size_t escaped = 0;
};

/// Compares (X . perp Y)(phi_t^X(z)) with xi(t, z) (X . perp Y)(z) using the
/// trajectory's Liouville density; residual |lhs - rhs| / (1 + |rhs|).
TransportResult invariant_transport_check(const VectorField& X, const VectorField& Y, double t,
                                          const Grid2D& samples, double dt);

/// The band of nodes where H_W = X . perp Y lies strictly between
/// kappa / C and kappa * C (ordered by the sign of kappa).
struct OmegaKappa {
    double kappa = 0.0;
    double C = 1.0;
    std::vector<std::size_t> nodes;

    OmegaKappa(const VectorField& X, const VectorField& Y, double kappa, double C, const Grid2D& grid);
    bool contains(double hw, double slack = 0.0) const;
    double lower() const;
    double upper() const;
};

struct ConfinementResult {
    std::size_t violations = 0;
    std::size_t level_samples = 0;
    std::size_t trajectory_points = 0;
    double worst_excess = 0.0;  // largest relative excursion beyond the band
};

/// Starts trajectories of X from the nodes with H_W within `level_band *
/// |kappa|` of kappa, runs them over [t_min, t_max], and counts points where
/// H_W leaves [kappa'/C, kappa' C] by more than tol * |kappa'|, kappa' being
/// the node's own level. No node at the level throws InconclusiveError.
ConfinementResult omega_kappa_confinement(const VectorField& X, const VectorField& Y, double kappa,
                                          double C, double t_min, double t_max,
                                          const Grid2D& samples, double dt, double tol = 1e-6,
                                          double level_band = 2e-2);

struct SteadyDensityResult {
    double max_residual = 0.0;
    std::vector<double> residual_X;  // per bump, |integral of rho X . grad psi|
    std::vector<double> residual_Y;
};

/// Weak divergence of rho V for rho = 1 / (X . perp Y) and V in {X, Y},
/// against scalar bumps. Supports touching {X . perp Y = 0} throw
/// PreconditionError.
SteadyDensityResult steady_density_residual(const VectorField& X, const VectorField& Y,
                                            const std::vector<BumpTestFn>& bumps, const Quadrature& q);

struct AlphaOptions {
    double speed_floor = 1e-3;
    /// Samples count as parallel when |X . perp Y| <= parallel_tol |X| |Y|.
    double parallel_tol = 1e-6;
};

struct AlphaResult {
    std::size_t samples = 0;
    double proportionality = 0.0;  // max |Y - alpha X| / |Y|
    double drift = 0.0;            // max change of alpha along phi^X
    double spot_error = 0.0;       // max |phi_t^X(z) - phi^Y_{t/alpha}(z)|
};

/// alpha = X . Y / |X|^2 on samples in the parallel regime. Throws
/// InconclusiveError when no sample qualifies.
AlphaResult alpha_proportionality(const VectorField& X, const VectorField& Y, const Grid2D& samples,
                                  double t_max, double dt, const AlphaOptions& opts = {});

struct TauResult {
    double tau = 0.0;
    double error = 0.0;  // |phi^kappa_tau(z0) - phi_t^X(z0)|
    double kappa = 0.0;  // H_W(z0)
};

/// Integrates tau' = H_W(phi_t^X) together with the flow, then flows the
/// auxiliary field X / H_W for time tau and compares endpoints. An orbit
/// with |H_W| <= floor throws SingularError.
TauResult tau_reparametrization(const VectorField& X, const VectorField& Y, Point2 z0, double t,
                                double dt, double floor = 1e-8);

struct VanishingResult {
    bool empty = true;
    std::size_t samples = 0;
    double max_speed = 0.0;  // max |X| along the phi^Y trajectories
};

/// Advects the samples where |X| <= floor along Y for times in [0, s_max]
/// and records |X| along the way.
VanishingResult vanishing_transport_check(const VectorField& X, const VectorField& Y,
                                          const Grid2D& samples, double s_max, double dt, double floor);

struct Tolerances {
    double bracket = 5e-3;
    double discrepancy = 1e-4;
    double bracket_gap = 0.1;
    double discrepancy_gap = 1e-2;
    double identity = 2e-3;
    double derivative = 5e-3;
    double wedge = 1e-9;
    double transport = 1e-4;
    double confinement = 1e-6;
    double steady = 3e-3;
    double alpha = 1e-6;
    double tau = 1e-4;
    double vanishing = 1e-9;
};

struct ReportConfig {
    Box domain{-2, 2, -2, 2};
    int sample_nx = 21;
    int sample_ny = 21;
    int quadrature_cells = 161;
    std::vector<double> t{0.3, 0.6};
    std::vector<double> s{0.3, 0.6};
    double dt = 1e-3;
    std::vector<BumpTestFn> bumps = bump_family(0.75, 0.6);
    Tolerances tol;
};

struct CommutativityReport {
    std::string pair;
    std::vector<double> t;
    std::vector<double> s;
    Discrepancy discrepancy;  // aggregated over all (t, s)
    double bracket_max = 0.0;
    std::vector<CheckResult> checks;
    Verdict verdict = Verdict::Gap;

    const CheckResult* find(const std::string& name) const;
    bool any_failed() const;
};

/// Bracket side, flow side, and every applicable consequence check.
CommutativityReport full_report(const std::string& pair, const VectorField& X, const VectorField& Y,
                                const ReportConfig& cfg);

}  // namespace flowlab
