#include "flowlab/commute.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "flowlab/bracket.hpp"
#include "flowlab/calculus.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Commuting: return "COMMUTING";
        case Verdict::NotCommuting: return "NOT-COMMUTING";
        case Verdict::Gap: return "GAP";
    }
    return "?";
}

std::optional<Verdict> parse_expectation(const std::string& s) {
    if (s == "commuting") return Verdict::Commuting;
    if (s == "not-commuting") return Verdict::NotCommuting;
    return std::nullopt;
}

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inconclusive: return "inconclusive";
        case CheckStatus::Skipped: return "skipped";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Flow-side measurements

Discrepancy commutator_discrepancy(const VectorField& X, const VectorField& Y, double t, double s,
                                   const Grid2D& samples, double dt) {
    std::vector<std::optional<double>> gap(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) {
        const Point2 z = samples.node(k);
        try {
            const Point2 a = flow_endpoint(X, flow_endpoint(Y, z, s, dt, false).point, t, dt, false).point;
            const Point2 b = flow_endpoint(Y, flow_endpoint(X, z, t, dt, false).point, s, dt, false).point;
            gap[k] = distance(a, b);
        } catch (const EscapeError&) {
        }
    });
    Discrepancy d;
    for (const auto& g : gap) {
        if (!g) {
            ++d.escaped;
            continue;
        }
        d.mean += *g;
        d.max = std::max(d.max, *g);
        ++d.samples;
    }
    if (2 * d.escaped > samples.size())
        throw InconclusiveError(std::to_string(d.escaped) + " of " + std::to_string(samples.size()) +
                                " samples escaped the domain");
    if (d.samples > 0) d.mean /= static_cast<double>(d.samples);
    return d;
}

TransportResult invariant_transport_check(const VectorField& X, const VectorField& Y, double t,
                                          const Grid2D& samples, double dt) {
    std::vector<std::optional<double>> res(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) {
        const Point2 z = samples.node(k);
        try {
            const FlowEndpoint e = flow_endpoint(X, z, t, dt, true);
            const double lhs = scalar_invariant(X, Y, e.point);
            const double rhs = e.density * scalar_invariant(X, Y, z);
            res[k] = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
        } catch (const EscapeError&) {
        }
    });
    TransportResult out;
    for (const auto& r : res) {
        if (!r) {
            ++out.escaped;
            continue;
        }
        out.max_residual = std::max(out.max_residual, *r);
        ++out.samples;
    }
    if (out.samples == 0) throw InconclusiveError("every transport sample escaped");
    return out;
}

// ---------------------------------------------------------------------------
// Omega_kappa

OmegaKappa::OmegaKappa(const VectorField& X, const VectorField& Y, double kappa_, double C_,
                       const Grid2D& grid)
    : kappa(kappa_), C(C_) {
    if (kappa == 0.0 || !std::isfinite(kappa)) throw PreconditionError("kappa must be nonzero");
    if (!(C >= 1.0) || !std::isfinite(C)) throw PreconditionError("compressibility constant must be >= 1");
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (contains(scalar_invariant(X, Y, grid.node(k)))) nodes.push_back(k);
}

double OmegaKappa::lower() const { return kappa > 0.0 ? kappa / C : kappa * C; }
double OmegaKappa::upper() const { return kappa > 0.0 ? kappa * C : kappa / C; }

bool OmegaKappa::contains(double hw, double slack) const {
    return hw > lower() - slack && hw < upper() + slack;
}

ConfinementResult omega_kappa_confinement(const VectorField& X, const VectorField& Y, double kappa,
                                          double C, double t_min, double t_max,
                                          const Grid2D& samples, double dt, double tol,
                                          double level_band) {
    if (kappa == 0.0) throw PreconditionError("kappa must be nonzero");
    if (!(C >= 1.0)) throw PreconditionError("compressibility constant must be >= 1");
    ConfinementResult out;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Point2 z = samples.node(k);
        const double level = scalar_invariant(X, Y, z);
        if (std::abs(level - kappa) > level_band * std::abs(kappa)) continue;
        ++out.level_samples;
        const double lo = std::min(level / C, level * C);
        const double hi = std::max(level / C, level * C);
        for (double t : {t_min, t_max}) {
            if (t == 0.0) continue;
            const Trajectory traj = integrate_flow(X, z, t, dt);
            for (const Point2& p : traj.points) {
                const double hw = scalar_invariant(X, Y, p);
                const double excess = std::max({lo - hw, hw - hi, 0.0}) / std::abs(level);
                out.worst_excess = std::max(out.worst_excess, excess);
                if (excess > tol) ++out.violations;
                ++out.trajectory_points;
            }
        }
    }
    if (out.level_samples == 0)
        throw InconclusiveError("no sample lies on the level X . perp Y = kappa");
    return out;
}

// ---------------------------------------------------------------------------
// Steady density

SteadyDensityResult steady_density_residual(const VectorField& X, const VectorField& Y,
                                            const std::vector<BumpTestFn>& bumps, const Quadrature& q) {
    SteadyDensityResult out;
    for (const BumpTestFn& psi : bumps) {
        // The density 1 / H_W must stay bounded on the support: no sign change
        // between samples, and no zero found by Gauss-Newton descent from the
        // smallest sample (which catches touching zeros such as -r^2 at 0).
        const Box box = psi.support_box();
        constexpr int n = 32;
        int sign = 0;
        double hw_max = 0.0, hw_min = INFINITY;
        Point2 start = psi.center;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                const Point2 z{box.xmin + box.width() * i / n, box.ymin + box.height() * j / n};
                if (distance(z, psi.center) > psi.radius) continue;
                const double hw = scalar_invariant(X, Y, z);
                const int sg = (hw > 0.0) - (hw < 0.0);
                if (sg == 0 || (sign != 0 && sg != sign))
                    throw PreconditionError("bump support touches the set where X . perp Y vanishes");
                sign = sg;
                hw_max = std::max(hw_max, std::abs(hw));
                if (std::abs(hw) < hw_min) {
                    hw_min = std::abs(hw);
                    start = z;
                }
            }
        const double h = 1e-6 * psi.radius;
        Point2 z = start;
        for (int it = 0; it < 60; ++it) {
            const double hw = scalar_invariant(X, Y, z);
            if (std::abs(hw) <= 1e-10 * std::max(1.0, hw_max))
                throw PreconditionError("bump support touches the set where X . perp Y vanishes");
            const Vec2 g{(scalar_invariant(X, Y, z + Vec2{h, 0}) - scalar_invariant(X, Y, z - Vec2{h, 0})) / (2 * h),
                         (scalar_invariant(X, Y, z + Vec2{0, h}) - scalar_invariant(X, Y, z - Vec2{0, h})) / (2 * h)};
            if (dot(g, g) == 0.0) break;
            Point2 next = z - (hw / dot(g, g)) * g;
            const double r = distance(next, psi.center);
            if (r > psi.radius) next = psi.center + (psi.radius / r) * (next - psi.center);
            if (distance(next, z) <= 1e-15 * psi.radius) break;
            z = next;
        }
        const auto weak_div = [&](const VectorField& V) {
            return integrate_bump(psi, q, [&](Point2 z) {
                const Vec2 g = psi.gradient(z);
                if (g == Vec2{}) return 0.0;
                const double hw = scalar_invariant(X, Y, z);
                if (std::abs(hw) <= 1e-12) throw PreconditionError("X . perp Y vanishes inside a bump support");
                return dot(V(z), g) / hw;
            });
        };
        out.residual_X.push_back(std::abs(weak_div(X).value));
        out.residual_Y.push_back(std::abs(weak_div(Y).value));
        out.max_residual = std::max({out.max_residual, out.residual_X.back(), out.residual_Y.back()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallel regime

AlphaResult alpha_proportionality(const VectorField& X, const VectorField& Y, const Grid2D& samples,
                                  double t_max, double dt, const AlphaOptions& opts) {
    const auto alpha = [&](Point2 p) {
        const Vec2 x = X(p);
        return dot(x, Y(p)) / dot(x, x);
    };
    AlphaResult out;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Point2 z = samples.node(k);
        const Vec2 x = X(z);
        const Vec2 y = Y(z);
        if (norm(x) < opts.speed_floor) continue;
        if (std::abs(dot(x, perp(y))) > opts.parallel_tol * norm(x) * norm(y)) continue;
        ++out.samples;
        const double a = alpha(z);
        const double ny = norm(y);
        out.proportionality = std::max(out.proportionality, norm(y - a * x) / (ny > 0.0 ? ny : 1.0));
        if (t_max == 0.0) continue;
        const Trajectory traj = integrate_flow(X, z, t_max, dt);
        for (const Point2& p : traj.points)
            if (norm(X(p)) >= opts.speed_floor) out.drift = std::max(out.drift, std::abs(alpha(p) - a));
        if (std::abs(a) > 1e-12 && std::abs(t_max / a) / dt <= 1e7) {
            const Point2 via_y = flow_endpoint(Y, z, t_max / a, dt, false).point;
            out.spot_error = std::max(out.spot_error, distance(traj.final_point(), via_y));
        }
    }
    if (out.samples == 0)
        throw InconclusiveError("no sample in the parallel regime above the speed floor");
    return out;
}

TauResult tau_reparametrization(const VectorField& X, const VectorField& Y, Point2 z0, double t,
                                double dt, double floor) {
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    const auto hw = [&](Point2 p) {
        const double v = scalar_invariant(X, Y, p);
        if (std::abs(v) <= floor) throw SingularError("orbit reaches the set where X . perp Y vanishes");
        return v;
    };
    TauResult out;
    out.kappa = hw(z0);
    if (t == 0.0) return out;

    // Joint RK4 for (q, tau) with q' = X(q), tau' = H_W(q).
    const double T = std::abs(t);
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt * (1.0 - 1e-12))));
    const double sign = t > 0.0 ? 1.0 : -1.0;
    Point2 q = z0;
    double tau = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double h = sign * (k + 1 == n ? T - static_cast<double>(n - 1) * dt : dt);
        const Vec2 k1 = X(q);
        const double m1 = hw(q);
        const Point2 q2 = q + 0.5 * h * k1;
        const Vec2 k2 = X(q2);
        const double m2 = hw(q2);
        const Point2 q3 = q + 0.5 * h * k2;
        const Vec2 k3 = X(q3);
        const double m3 = hw(q3);
        const Point2 q4 = q + h * k3;
        const Vec2 k4 = X(q4);
        const double m4 = hw(q4);
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }
    out.tau = tau;

    VectorField::Options opts;
    opts.domain = X.domain();
    const VectorField aux = VectorField::closed_form(
        X.name() + "/H_W", [X, hw](Point2 p) { return X(p) / hw(p); }, opts);
    const Point2 via_aux = tau == 0.0 ? z0 : flow_endpoint(aux, z0, tau, dt, false).point;
    out.error = distance(via_aux, q);
    return out;
}

VanishingResult vanishing_transport_check(const VectorField& X, const VectorField& Y,
                                          const Grid2D& samples, double s_max, double dt, double floor) {
    VanishingResult out;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Point2 z = samples.node(k);
        if (norm(X(z)) > floor) continue;
        out.empty = false;
        ++out.samples;
        const Trajectory traj = integrate_flow(Y, z, s_max, dt);
        for (const Point2& p : traj.points) out.max_speed = std::max(out.max_speed, norm(X(p)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full report

const CheckResult* CommutativityReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

bool CommutativityReport::any_failed() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Verdict side(double value, double zero_tol, double nonzero_tol) {
    if (value <= zero_tol) return Verdict::Commuting;
    if (value >= nonzero_tol) return Verdict::NotCommuting;
    return Verdict::Gap;
}

CheckResult decisive(const std::string& name, double value, double zero_tol, double nonzero_tol) {
    const Verdict v = side(value, zero_tol, nonzero_tol);
    CheckResult c{name, v == Verdict::Gap ? CheckStatus::Inconclusive : CheckStatus::Pass, value,
                  zero_tol, ""};
    c.detail = v == Verdict::Commuting      ? "zero side (<= " + fmt(zero_tol) + ")"
               : v == Verdict::NotCommuting ? "nonzero side (>= " + fmt(nonzero_tol) + ")"
                                            : "in the gap between " + fmt(zero_tol) + " and " + fmt(nonzero_tol);
    return c;
}

// Runs a consequence check, mapping the "regime is empty or degenerate"
// errors to inconclusive and any other library error to a failure.
CheckResult guarded(const std::string& name, double tolerance, const std::function<CheckResult()>& body) {
    try {
        return body();
    } catch (const InconclusiveError& e) {
        return {name, CheckStatus::Inconclusive, 0.0, tolerance, e.what()};
    } catch (const EscapeError& e) {
        return {name, CheckStatus::Inconclusive, 0.0, tolerance, e.what()};
    } catch (const SingularError& e) {
        return {name, CheckStatus::Inconclusive, 0.0, tolerance, e.what()};
    } catch (const Error& e) {
        return {name, CheckStatus::Fail, 0.0, tolerance, e.what()};
    }
}

CheckResult bounded(const std::string& name, double value, double tolerance, std::string detail = {}) {
    return {name, value <= tolerance ? CheckStatus::Pass : CheckStatus::Fail, value, tolerance,
            std::move(detail)};
}

}  // namespace

CommutativityReport full_report(const std::string& pair, const VectorField& X, const VectorField& Y,
                                const ReportConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    const Grid2D samples(cfg.domain, cfg.sample_nx, cfg.sample_ny);
    const Quadrature quad{cfg.domain, cfg.quadrature_cells};
    CommutativityReport rep;
    rep.pair = pair;
    rep.t = cfg.t;
    rep.s = cfg.s;

    // Bracket side.
    double identity_residual = 0.0, derivative_gap = 0.0, derivative_tol = tol.derivative;
    for (const BumpTestFn& psi : cfg.bumps) {
        const HamiltonianFormResult h = hamiltonian_form_residual(X, Y, psi, quad);
        rep.bracket_max = std::max(rep.bracket_max, std::abs(h.definition.value));
        identity_residual = std::max(identity_residual, h.residual);
        const PairingResult d0 = dTdt(X, Y, 0.0, psi, quad, cfg.dt);
        const double allowed =
            std::max(tol.derivative, 2.0 * (d0.error_estimate + h.definition.error_estimate));
        if (std::abs(d0.value - h.definition.value) - allowed > derivative_gap - derivative_tol) {
            derivative_gap = std::abs(d0.value - h.definition.value);
            derivative_tol = allowed;
        }
    }
    const Verdict bracket_side = side(rep.bracket_max, tol.bracket, tol.bracket_gap);
    rep.checks.push_back(decisive("bracket_pairing", rep.bracket_max, tol.bracket, tol.bracket_gap));
    rep.checks.push_back(bounded("hamiltonian_form_identity", identity_residual, tol.identity));
    rep.checks.push_back(bounded("bracket_equals_dTdt_at_zero", derivative_gap, derivative_tol));

    if (X.declared_divergence_free() && Y.declared_divergence_free()) {
        const WedgeConstancy w = is_commuting_invariant(X, Y, samples, tol.wedge);
        CheckResult c{"wedge_constancy", CheckStatus::Pass, w.width, tol.wedge,
                      std::string(w.constant ? "constant" : "not constant") + ", mean " + fmt(w.mean)};
        if (bracket_side == Verdict::Gap)
            c.status = CheckStatus::Inconclusive;
        else if (w.constant != (bracket_side == Verdict::Commuting))
            c.status = CheckStatus::Fail;
        rep.checks.push_back(c);
    } else {
        rep.checks.push_back({"wedge_constancy", CheckStatus::Skipped, 0.0, tol.wedge,
                              "needs two divergence-free fields"});
    }

    // Flow side.
    std::size_t counted = 0;
    for (double t : cfg.t)
        for (double s : cfg.s) {
            const Discrepancy d = commutator_discrepancy(X, Y, t, s, samples, cfg.dt);
            rep.discrepancy.mean += d.mean * static_cast<double>(d.samples);
            rep.discrepancy.max = std::max(rep.discrepancy.max, d.max);
            rep.discrepancy.escaped += d.escaped;
            rep.discrepancy.samples += d.samples;
            counted += d.samples;
        }
    if (counted > 0) rep.discrepancy.mean /= static_cast<double>(counted);
    const Verdict flow_side = side(rep.discrepancy.max, tol.discrepancy, tol.discrepancy_gap);
    rep.checks.push_back(decisive("flow_discrepancy", rep.discrepancy.max, tol.discrepancy,
                                  tol.discrepancy_gap));

    // Consequences of [X, Y] = 0.
    const double t_max = cfg.t.empty() ? 0.0 : *std::max_element(cfg.t.begin(), cfg.t.end());
    const double s_max = cfg.s.empty() ? 0.0 : *std::max_element(cfg.s.begin(), cfg.s.end());
    const std::vector<std::string> consequences{"invariant_transport", "omega_kappa_confinement",
                                                "steady_density", "alpha_proportionality",
                                                "tau_reparametrization", "vanishing_set_transport"};
    if (bracket_side != Verdict::Commuting) {
        for (const auto& name : consequences)
            rep.checks.push_back({name, CheckStatus::Skipped, 0.0, 0.0,
                                  "consequence of a vanishing bracket; the bracket is not zero"});
    } else {
        // Levels of H_W = X . perp Y on the samples.
        std::vector<std::pair<double, std::size_t>> levels;
        double hw_max = 0.0, x_max = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double hw = scalar_invariant(X, Y, samples.node(k));
            hw_max = std::max(hw_max, std::abs(hw));
            x_max = std::max(x_max, norm(X(samples.node(k))));
            levels.push_back({hw, k});
        }
        std::vector<std::pair<double, std::size_t>> nonzero;
        for (const auto& l : levels)
            if (std::abs(l.first) > 1e-9 * (1.0 + hw_max)) nonzero.push_back(l);
        std::sort(nonzero.begin(), nonzero.end(), [](const auto& a, const auto& b) {
            return std::abs(a.first) < std::abs(b.first) ||
                   (std::abs(a.first) == std::abs(b.first) && a.second < b.second);
        });
        const std::optional<std::pair<double, std::size_t>> median =
            nonzero.empty() ? std::nullopt : std::optional(nonzero[nonzero.size() / 2]);

        rep.checks.push_back(guarded("invariant_transport", tol.transport, [&] {
            double worst = 0.0;
            for (double t : cfg.t) worst = std::max(worst, invariant_transport_check(X, Y, t, samples, cfg.dt).max_residual);
            return bounded("invariant_transport", worst, tol.transport);
        }));

        if (!median) {
            rep.checks.push_back({"omega_kappa_confinement", CheckStatus::Skipped, 0.0, tol.confinement,
                                  "X . perp Y vanishes on every sample, so no band Omega_kappa exists"});
        } else {
            rep.checks.push_back(guarded("omega_kappa_confinement", tol.confinement, [&] {
                double C = 1.0;
                for (double t : {-t_max, t_max})
                    if (t != 0.0) C = std::max(C, compressibility_estimate(flow_map(X, samples, t, cfg.dt)));
                C *= 1.0 + tol.confinement;
                const ConfinementResult r = omega_kappa_confinement(X, Y, median->first, C, -t_max, t_max,
                                                                    samples, cfg.dt, tol.confinement);
                return CheckResult{"omega_kappa_confinement",
                                   r.violations == 0 ? CheckStatus::Pass : CheckStatus::Fail, r.worst_excess,
                                   tol.confinement,
                                   std::to_string(r.violations) + " violations; kappa " + fmt(median->first) +
                                       ", C " + fmt(C) + ", " + std::to_string(r.level_samples) +
                                       " samples at level"};
            }));
        }

        if (!median) {
            rep.checks.push_back({"steady_density", CheckStatus::Skipped, 0.0, tol.steady,
                                  "X . perp Y vanishes on every sample, so 1/H_W is undefined"});
        } else {
            rep.checks.push_back(guarded("steady_density", tol.steady, [&] {
                std::vector<BumpTestFn> usable;
                std::size_t rejected = 0;
                for (const BumpTestFn& b : cfg.bumps) {
                    const BumpTestFn sb = BumpTestFn::scalar(b.center, b.radius);
                    if (std::any_of(usable.begin(), usable.end(), [&](const BumpTestFn& u) {
                            return u.center == sb.center && u.radius == sb.radius;
                        }))
                        continue;
                    try {
                        steady_density_residual(X, Y, {sb}, Quadrature{cfg.domain, 9});
                        usable.push_back(sb);
                    } catch (const PreconditionError&) {
                        ++rejected;
                    }
                }
                if (usable.empty())
                    throw InconclusiveError("every bump support meets the set where X . perp Y vanishes");
                const SteadyDensityResult r = steady_density_residual(X, Y, usable, quad);
                return bounded("steady_density", r.max_residual, tol.steady,
                               std::to_string(usable.size()) + " bumps, " + std::to_string(rejected) +
                                   " rejected");
            }));
        }

        rep.checks.push_back(guarded("alpha_proportionality", tol.alpha, [&] {
            AlphaOptions opts;
            opts.speed_floor = 1e-3 * x_max;
            const AlphaResult r = alpha_proportionality(X, Y, samples, t_max, cfg.dt, opts);
            const double worst = std::max({r.proportionality, r.drift, r.spot_error});
            return bounded("alpha_proportionality", worst, tol.alpha,
                           std::to_string(r.samples) + " parallel samples");
        }));

        if (!median) {
            rep.checks.push_back({"tau_reparametrization", CheckStatus::Skipped, 0.0, tol.tau,
                                  "X . perp Y vanishes on every sample"});
        } else {
            rep.checks.push_back(guarded("tau_reparametrization", tol.tau, [&] {
                const Point2 z0 = samples.node(median->second);
                const TauResult r = tau_reparametrization(X, Y, z0, t_max, cfg.dt);
                return bounded("tau_reparametrization", r.error, tol.tau, "tau " + fmt(r.tau));
            }));
        }

        rep.checks.push_back(guarded("vanishing_set_transport", tol.vanishing, [&] {
            const VanishingResult r = vanishing_transport_check(X, Y, samples, s_max, cfg.dt, 1e-3 * x_max);
            if (r.empty) throw InconclusiveError("X does not vanish on any sample");
            return bounded("vanishing_set_transport", r.max_speed, tol.vanishing,
                           std::to_string(r.samples) + " vanishing samples");
        }));
    }

    if (bracket_side == Verdict::Commuting && flow_side == Verdict::Commuting && !rep.any_failed())
        rep.verdict = Verdict::Commuting;
    else if (bracket_side == Verdict::NotCommuting && flow_side == Verdict::NotCommuting)
        rep.verdict = Verdict::NotCommuting;
    else
        rep.verdict = Verdict::Gap;
    return rep;
}

}  // namespace flowlab
