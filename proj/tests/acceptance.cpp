// Acceptance suite: one PASS/FAIL line per criterion, with its runtime
// against the budget. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowlab/bracket.hpp"
#include "flowlab/calculus.hpp"
#include "flowlab/catalog.hpp"
#include "flowlab/commute.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/expr.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/hamiltonian.hpp"

using namespace flowlab;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (ok) detail.clear();
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) {
        if (ok) detail += (detail.empty() ? "" : "; ") + s;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const Box domain{-2, 2, -2, 2};
const Quadrature quad{domain, 161};
const std::vector<BumpTestFn> family = bump_family(0.75, 0.6);

std::vector<const CatalogEntry*> commuting_pairs() {
    std::vector<const CatalogEntry*> out;
    for (const auto& e : catalog())
        if (e.expected == Verdict::Commuting) out.push_back(&e);
    return out;
}

// ---------------------------------------------------------------------------

Outcome bracket_identity() {
    Outcome o;
    double worst = 0.0;
    for (const auto& e : catalog())
        for (const BumpTestFn& psi : family) {
            const double r = hamiltonian_form_residual(e.field_X(), e.field_Y(), psi, quad).residual;
            worst = std::max(worst, r);
            o.require(r <= 2e-3, e.name + " residual " + fmt(r));
        }
    o.note("6 pairs x 8 bumps, max residual " + fmt(worst));
    return o;
}

Outcome bracket_vs_derivative() {
    Outcome o;
    const double dt = 1e-2;
    for (const auto& e : catalog())
        for (const BumpTestFn& psi : family) {
            const PairingResult d = dTdt(e.field_X(), e.field_Y(), 0.0, psi, quad, dt);
            const PairingResult b = distributional_lie_bracket(e.field_X(), e.field_Y(), psi, quad);
            const double gap = std::abs(d.value - b.value);
            o.require(gap <= std::max(5e-3, 2 * (d.error_estimate + b.error_estimate)), e.name + " gap " + fmt(gap));
        }
    const CatalogEntry& shear = catalog_entry("shear-noncommuting");
    const BumpTestFn unit = BumpTestFn::vector({0, 0}, 1.0, {0, 1});
    const double v = dTdt(shear.field_X(), shear.field_Y(), 0.0, unit, quad, dt).value;
    o.require(std::abs(v - pi / 4) <= 5e-3, "shear dTdt(0) " + fmt(v));
    o.note("shear unit e2-bump dTdt(0) = " + fmt(v) + " vs pi/4");
    return o;
}

Outcome t_t_vanishes() {
    Outcome o;
    double worst = 0.0;
    for (const CatalogEntry* e : commuting_pairs())
        for (double t : {0.25, 0.5, 1.0})
            for (const BumpTestFn& psi : family) {
                const double v = std::abs(T_t(e->field_X(), e->field_Y(), t, psi, quad, 1e-2).value);
                worst = std::max(worst, v);
                o.require(v <= 5e-3, e->name + " |T_" + fmt(t) + "| " + fmt(v));
            }
    o.note("4 pairs x 3 times x 8 bumps, max |T_t| " + fmt(worst));
    return o;
}

Outcome noncommutation_oracle() {
    Outcome o;
    const CatalogEntry& e = catalog_entry("shear-noncommuting");
    const Grid2D samples(-1, 1, -1, 1, 11, 11);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double s = 0.25 * i, t = 0.25 * j;
            const Discrepancy d = commutator_discrepancy(e.field_X(), e.field_Y(), t, s, samples, 1e-3);
            worst = std::max({worst, std::abs(d.max - s * t), std::abs(d.mean - s * t)});
        }
    o.require(worst <= 1e-8, "max |discrepancy - s t| " + fmt(worst));
    o.note("max |discrepancy - s t| = " + fmt(worst));
    return o;
}

Outcome invariant_transport() {
    Outcome o;
    const CatalogEntry& e = catalog_entry("scaling-rotation");
    const VectorField X = e.field_X(), Y = e.field_Y();
    const Grid2D samples(-1.5, 1.5, -1.5, 1.5, 10, 10);
    double worst = 0.0, closed = 0.0;
    for (double t : {0.25, 0.5}) {
        worst = std::max(worst, invariant_transport_check(X, Y, t, samples, 1e-3).max_residual);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const Point2 z = samples.node(k);
            const double lhs = scalar_invariant(X, Y, flow_endpoint(X, z, t, 1e-3, false).point);
            const double exact = -std::exp(2 * t) * (z.x * z.x + z.y * z.y);
            closed = std::max(closed, std::abs(lhs - exact) / (1 + std::abs(exact)));
        }
    }
    o.require(worst <= 1e-4, "residual " + fmt(worst));
    o.require(closed <= 1e-8, "closed-form mismatch " + fmt(closed));
    o.note("100 samples, residual " + fmt(worst) + ", closed form " + fmt(closed));
    return o;
}

Outcome steady_density() {
    Outcome o;
    const CatalogEntry& e = catalog_entry("scaling-rotation");
    std::vector<BumpTestFn> ring;
    for (int k = 0; k < 8; ++k)
        ring.push_back(BumpTestFn::scalar({1.2 * std::cos(k * pi / 4), 1.2 * std::sin(k * pi / 4)}, 0.5));
    const SteadyDensityResult r = steady_density_residual(e.field_X(), e.field_Y(), ring, quad);
    o.require(r.max_residual <= 3e-3, "residual " + fmt(r.max_residual));
    o.note("8 bumps on the annulus 0.7 < |z| < 1.7, max residual " + fmt(r.max_residual));
    return o;
}

Outcome tau_check() {
    Outcome o;
    const CatalogEntry& e = catalog_entry("scaling-rotation");
    const TauResult r = tau_reparametrization(e.field_X(), e.field_Y(), {1, 0}, 0.5, 1e-3);
    const double expected = (1 - std::exp(1.0)) / 2;
    o.require(std::abs(r.tau - expected) <= 1e-4, "tau " + fmt(r.tau));
    o.require(r.error <= 1e-4, "reparametrization error " + fmt(r.error));
    o.note("tau = " + std::to_string(r.tau) + ", error " + fmt(r.error));
    return o;
}

Outcome level_set_flow_check() {
    Outcome o;
    const VectorField X = make_builtin("rotation");
    const Grid2D g(-2, 2, -2, 2, 161, 161);
    const HamiltonianResult H = reconstruct_hamiltonian(X, g, {0, 0});
    const LevelSetDecomposition d = extract_level_set(H.H, 0.5, g, &X);
    o.require(d.curves.size() == 1, "expected one unit circle, got " + std::to_string(d.curves.size()));
    if (d.curves.size() != 1) return o;
    const LevelCurve& c = d.curves[0];
    const double P = period(X, c);
    o.require(std::abs(P - 2 * pi) <= 1e-2, "period " + fmt(P));
    double worst = 0.0;
    for (double t : {0.5, 1.0, 3.0}) {
        const Point2 ode = flow_endpoint(X, {1, 0}, t, 1e-3, false).point;
        worst = std::max(worst, distance(level_set_flow(X, c, {1, 0}, t), ode));
    }
    o.require(worst <= 2e-3, "level-set vs RK4 " + fmt(worst));
    o.note("period " + std::to_string(P) + ", max distance to RK4 " + fmt(worst));
    return o;
}

Outcome liouville() {
    Outcome o;
    const Grid2D g(-1.5, 1.5, -1.5, 1.5, 31, 31);
    std::size_t fields = 0;
    double worst = 0.0;
    for (const auto& e : catalog())
        for (const FieldRecipe* r : {&e.X, &e.Y}) {
            const VectorField F = make_builtin(r->builtin, r->params);
            const FlowMap fm = flow_map(F, g, 0.5, 1e-3);
            ++fields;
            for (int j = 1; j + 1 < g.ny(); ++j)
                for (int i = 1; i + 1 < g.nx(); ++i) {
                    const double det = jacobian_det_fd(fm, i, j);
                    const double xi = fm.densities[g.index(i, j)];
                    const double ratio = std::abs(xi - det) / std::max(1e-3, 1e-2 * std::abs(det));
                    worst = std::max(worst, ratio);
                    if (ratio > 1.0) o.require(false, e.name + " field " + r->builtin + " at node " +
                                                          std::to_string(i) + "," + std::to_string(j));
                }
        }
    o.note(std::to_string(fields) + " fields, worst |xi - det| / bound " + fmt(worst));
    return o;
}

Outcome stability() {
    Outcome o;
    const Grid2D g(-2, 2, -2, 2, 81, 81);
    const auto rows = stability_check(make_builtin("cellular"), {0.4, 0.2, 0.1}, 1.0, g, 1e-3);
    std::string seq;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        seq += (k ? " > " : "") + fmt(rows[k].mean_distance);
        if (k > 0) o.require(rows[k].mean_distance < rows[k - 1].mean_distance, "not decreasing: " + seq);
    }
    o.note("mean distances " + seq);
    return o;
}

Outcome two_sided_gate() {
    Outcome o;
    const ReportConfig cfg;
    std::string summary;
    for (const auto& e : catalog()) {
        const CommutativityReport r = full_report(e.name, e.field_X(), e.field_Y(), cfg);
        const bool bracket_zero = r.bracket_max <= cfg.tol.bracket;
        const bool flows_commute = r.discrepancy.max <= cfg.tol.discrepancy;
        o.require(r.verdict != Verdict::Gap, e.name + " in the gap");
        o.require(bracket_zero == flows_commute, e.name + " sides disagree");
        o.require(r.verdict == e.expected, e.name + " verdict " + to_string(r.verdict));
        o.require(!r.any_failed(), e.name + " has a failing check");
        summary += (summary.empty() ? "" : ", ") + e.name + " " + to_string(r.verdict);
    }
    o.note(summary);
    return o;
}

// Fragments that keep the fuzzer near the grammar, mixed with raw bytes.
const char* const kFragments[] = {"x", "y", "1", "2.5", "1e3", "1e", ".5", "+", "-", "*", "/", "^", "^2", "(",
                                  ")", "sin(", "cos(", "exp(", "sqrt(", "abs(", " ", "tan(", "z", "1e999", "0x1"};

// Random well-formed source, so the round trip sees deep trees too.
std::string random_expr(std::mt19937_64& rng, int depth) {
    const unsigned pick = depth <= 0 ? rng() % 3 : rng() % 10;
    switch (pick) {
        case 0: return "x";
        case 1: return "y";
        case 2: return std::to_string(rng() % 1000 / 100.0).substr(0, 4);
        case 3: return "-" + random_expr(rng, depth - 1);
        case 4: return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
        case 5: {
            static const char* const fns[] = {"sin", "cos", "exp", "sqrt", "abs"};
            return std::string(fns[rng() % 5]) + "(" + random_expr(rng, depth - 1) + ")";
        }
        default: {
            static const char ops[] = {'+', '-', '*', '/'};
            return random_expr(rng, depth - 1) + " " + ops[rng() % 4] + " " + random_expr(rng, depth - 1);
        }
    }
}

Outcome parser_robustness() {
    Outcome o;
    std::mt19937_64 rng(20260101);
    std::size_t parsed = 0, rejected = 0;
    for (int k = 0; k < 10000; ++k) {
        std::string src;
        const std::size_t target = std::uniform_int_distribution<std::size_t>(0, 1024)(rng) >> (k % 4 == 0 ? 0 : 4);
        while (src.size() < target) {
            if (rng() % 5 == 0)
                src += static_cast<char>(rng() % 256);
            else
                src += kFragments[rng() % std::size(kFragments)];
        }
        if (src.size() > 1024) src.resize(1024);
        try {
            const dsl::Expr e = dsl::parse_expr(src);
            ++parsed;
            const dsl::Expr again = dsl::parse_expr(dsl::to_string(e));
            if (!dsl::structurally_equal(e, again)) o.require(false, "round trip changed '" + src.substr(0, 40) + "'");
        } catch (const ParseError& err) {
            ++rejected;
            if (err.position() > src.size())
                o.require(false, "position " + std::to_string(err.position()) + " beyond input length");
        } catch (const std::exception& err) {
            o.require(false, std::string("unexpected exception: ") + err.what());
        }
    }
    std::size_t round_trips = 0;
    for (int k = 0; k < 2000; ++k) {
        const std::string src = random_expr(rng, 1 + k % 6);
        try {
            const dsl::Expr e = dsl::parse_expr(src);
            const std::string text = dsl::to_string(e);
            if (!dsl::structurally_equal(e, dsl::parse_expr(text)))
                o.require(false, "'" + src.substr(0, 40) + "' rendered as '" + text.substr(0, 40) + "'");
            ++round_trips;
        } catch (const std::exception& err) {
            o.require(false, "generated '" + src.substr(0, 40) + "' failed: " + err.what());
        }
    }
    std::mt19937_64 pts(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& e : catalog()) {
        const auto src = e.sources();
        for (const std::string& s : src) {
            const dsl::Expr a = dsl::parse_expr(s);
            if (!dsl::structurally_equal(a, dsl::parse_expr(dsl::to_string(a))))
                o.require(false, "catalog source '" + s + "' does not round-trip");
        }
        const VectorField X = dsl::parse_vector_field(src[0], src[1]);
        const VectorField Y = dsl::parse_vector_field(src[2], src[3]);
        for (int k = 0; k < 20; ++k) {
            const Point2 p{u(pts), u(pts)};
            if (distance(X(p), e.field_X()(p)) > 1e-12 || distance(Y(p), e.field_Y()(p)) > 1e-12)
                o.require(false, e.name + " sources disagree with the builtin fields");
        }
    }
    o.note(std::to_string(parsed) + " fuzz inputs parsed, " + std::to_string(rejected) + " rejected with positions, " +
           std::to_string(round_trips) + " generated round trips");
    return o;
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"bracket identity", 10, bracket_identity},
        {"bracket vs derivative", 20, bracket_vs_derivative},
        {"T_t vanishing for commuting pairs", 30, t_t_vanishes},
        {"quantitative non-commutation oracle", 5, noncommutation_oracle},
        {"invariant transport", 10, invariant_transport},
        {"steady density", 10, steady_density},
        {"tau reparametrization", 5, tau_check},
        {"level-set flow", 10, level_set_flow_check},
        {"Liouville consistency", 20, liouville},
        {"stability under mollification", 30, stability},
        {"two-sided commutation gate", 60, two_sided_gate},
        {"parser robustness", 10, parser_robustness},
    };
    int failures = 0;
    double total = 0.0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const Criterion& c = criteria[k];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("threw: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        total += secs;
        if (secs > c.budget_s) o.require(false, "over the " + fmt(c.budget_s) + " s budget");
        if (!o.ok) ++failures;
        std::printf("[%s] %2zu. %-38s %6.2f s  %s\n", o.ok ? "PASS" : "FAIL", k + 1, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failures, criteria.size(), total);
    return failures == 0 ? 0 : 1;
}
