#include "flowlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "flowlab/bracket.hpp"
#include "flowlab/catalog.hpp"
#include "flowlab/config.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/hamiltonian.hpp"
#include "flowlab/report.hpp"

namespace flowlab {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string out;
    std::string expect;
    std::string pair;
    std::optional<std::uint64_t> seed;  // reserved: every pipeline is deterministic
    std::optional<int> quad;
    std::optional<double> dt;
};

struct Scenario {
    ScenarioConfig cfg;
    VectorField X;
    VectorField Y;

    const VectorField& pick(const std::string& which) const { return which == "Y" ? Y : X; }
};

std::string num(double v, int precision = 6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << text;
}

ScenarioConfig resolve_config(const Options& o) {
    ScenarioConfig cfg;
    if (!o.config.empty())
        cfg = load_config(o.config);
    else if (!o.pair.empty())
        cfg = catalog_config(o.pair);
    else
        throw ConfigError("", "no scenario: pass --config PATH or --pair NAME");
    if (!o.config.empty() && !o.pair.empty()) {
        ScenarioConfig named = catalog_config(o.pair);
        cfg.pair = named.pair;
        cfg.X = named.X;
        cfg.Y = named.Y;
        cfg.catalog_expectation = named.catalog_expectation;
    }
    if (o.quad) {
        if (*o.quad < 16) throw ConfigError("/resolution/quadrature", "--quad must be >= 16, got " + std::to_string(*o.quad));
        cfg.quadrature = *o.quad;
    }
    if (o.dt) {
        if (!(*o.dt > 0.0) || !std::isfinite(*o.dt)) throw ConfigError("/dt", "--dt must be > 0");
        cfg.dt = *o.dt;
    }
    if (!o.out.empty()) cfg.output = o.out;
    return cfg;
}

Scenario make_scenario(const Options& o) {
    ScenarioConfig cfg = resolve_config(o);
    VectorField X = build_field(cfg.X, cfg, "X");
    VectorField Y = build_field(cfg.Y, cfg, "Y");
    fs::create_directories(cfg.output);
    return {std::move(cfg), std::move(X), std::move(Y)};
}

// ---------------------------------------------------------------------------

int cmd_catalog(std::ostream& out) {
    out << "pairs:\n";
    for (const auto& e : catalog()) {
        const auto src = e.sources();
        out << "  " << std::left << std::setw(22) << e.name << std::setw(15) << to_string(e.expected) << e.regime
            << "\n      X = (" << src[0] << ", " << src[1] << ")  Y = (" << src[2] << ", " << src[3] << ")\n"
            << "      " << e.notes << "\n";
    }
    out << "builtin fields:\n";
    for (const auto& b : builtins()) {
        out << "  " << std::left << std::setw(12) << b.name << b.formula;
        if (!b.params.empty()) {
            out << "  [";
            for (std::size_t i = 0; i < b.params.size(); ++i)
                out << (i ? ", " : "") << b.params[i].first << "=" << num(b.params[i].second);
            out << "]";
        }
        out << "\n";
    }
    return kExitOk;
}

int cmd_commute(const Scenario& sc, const Options& o, std::ostream& out, std::ostream& err) {
    std::optional<Verdict> expected;
    if (!o.expect.empty()) expected = parse_expectation(o.expect);
    const CommutativityReport rep = full_report(sc.cfg.pair, sc.X, sc.Y, sc.cfg.report_config());
    write_text(sc.cfg.output / "commute.json", dump_json(report_json(rep)));

    out << "pair " << rep.pair << "\n";
    for (const auto& c : rep.checks) {
        out << "  " << std::left << std::setw(28) << c.name << std::setw(13) << to_string(c.status);
        if (c.status != CheckStatus::Skipped) out << std::setw(14) << num(c.value) << "tol " << std::setw(10) << num(c.tolerance);
        out << "  " << c.detail << "\n";
    }
    out << "discrepancy mean " << num(rep.discrepancy.mean) << " max " << num(rep.discrepancy.max) << ", escaped "
        << rep.discrepancy.escaped << "\n";
    out << "verdict " << to_string(rep.verdict) << "\n";

    if (expected) {
        if (rep.verdict != *expected) {
            err << "verdict " << to_string(rep.verdict) << " does not match expected " << to_string(*expected) << "\n";
            return kExitCheckFailed;
        }
        return kExitOk;
    }
    if (rep.any_failed() || rep.verdict == Verdict::Gap) {
        err << "commutativity checks did not reach a clean verdict\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_bracket(const Scenario& sc, std::ostream& out, std::ostream& err) {
    const ScenarioConfig& cfg = sc.cfg;
    const Quadrature q{cfg.domain, cfg.quadrature};
    Json rows = Json::array();
    const auto row = [&](const char* quantity, const BumpTestFn& psi, double t, double s, const PairingResult& p) {
        rows.push_back({{"pair", cfg.pair},
                        {"quantity", quantity},
                        {"psi", bump_json(psi)},
                        {"t", t},
                        {"s", s},
                        {"value", p.value},
                        {"quad_error", p.error_estimate}});
    };
    double identity = 0.0, derivative_excess = 0.0;
    out << "pair " << cfg.pair << "  (quadrature " << cfg.quadrature << ", dt " << num(cfg.quad_dt) << ")\n";
    out << "  center            dir      bracket       hamiltonian   dTdt(0)     ";
    for (double t : cfg.bracket.t) out << " T_" << std::left << std::setw(10) << num(t, 3);
    out << "\n";
    for (const BumpTestFn& psi : cfg.bumps) {
        const HamiltonianFormResult h = hamiltonian_form_residual(sc.X, sc.Y, psi, q);
        const PairingResult d0 = dTdt(sc.X, sc.Y, 0.0, psi, q, cfg.quad_dt);
        row("bracket", psi, 0.0, 0.0, h.definition);
        row("hamiltonian_form", psi, 0.0, 0.0, h.hamiltonian);
        row("dTdt", psi, 0.0, 0.0, d0);
        identity = std::max(identity, h.residual);
        const double allowed = std::max(cfg.tol.derivative, 2.0 * (d0.error_estimate + h.definition.error_estimate));
        derivative_excess = std::max(derivative_excess, std::abs(d0.value - h.definition.value) - allowed);

        out << "  (" << std::right << std::setw(6) << num(psi.center.x, 3) << ", " << std::setw(6)
            << num(psi.center.y, 3) << ")  (" << num(psi.dir().x, 2) << "," << num(psi.dir().y, 2) << ")  "
            << std::left << std::setw(14) << num(h.definition.value) << std::setw(14) << num(h.hamiltonian.value)
            << std::setw(12) << num(d0.value);
        for (double t : cfg.bracket.t) {
            const PairingResult p = T_t(sc.X, sc.Y, t, psi, q, cfg.quad_dt);
            row("T_t", psi, t, 0.0, p);
            out << " " << std::setw(12) << num(p.value);
        }
        out << "\n";
        for (double t : cfg.t)
            for (double s : cfg.s) row("T_ts", psi, t, s, T_ts(sc.X, sc.Y, t, s, psi, q, cfg.quad_dt));
    }
    const bool ok = identity <= cfg.tol.identity && derivative_excess <= 0.0;
    Json doc = {{"pair", cfg.pair},
                {"quadrature", cfg.quadrature},
                {"quad_dt", cfg.quad_dt},
                {"identity_residual_max", identity},
                {"identity_tolerance", cfg.tol.identity},
                {"derivative_excess_max", derivative_excess},
                {"status", ok ? "pass" : "fail"},
                {"pairings", rows}};
    write_text(cfg.output / "bracket.json", dump_json(doc));
    out << "hamiltonian-form residual max " << num(identity) << " (tol " << num(cfg.tol.identity) << ")\n";
    if (!ok) {
        err << "bracket identities failed\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_flow(const Scenario& sc, std::ostream& out, std::ostream& err) {
    const ScenarioConfig& cfg = sc.cfg;
    Json fields = Json::object();
    std::size_t liouville_violations = 0;
    for (const char* label : {"X", "Y"}) {
        const VectorField& F = sc.pick(label);
        Json trajectories = Json::array();
        for (std::size_t k = 0; k < cfg.flow.starts.size(); ++k) {
            const Point2 z = cfg.flow.starts[k];
            Json entry = {{"start", {z.x, z.y}}};
            try {
                const Trajectory tr = integrate_flow(F, z, cfg.flow.t, cfg.dt);
                const std::string file = "trajectory_" + std::string(label) + "_" + std::to_string(k) + ".csv";
                write_trajectory_csv((cfg.output / file).string(), tr);
                entry["end"] = {tr.final_point().x, tr.final_point().y};
                entry["density"] = tr.final_density();
                entry["file"] = file;
            } catch (const EscapeError& e) {
                entry["escaped_at"] = e.exit_time();
            }
            trajectories.push_back(entry);
        }
        Json summary = {{"t", cfg.flow.t}, {"dt", cfg.dt}, {"trajectories", trajectories}};
        if (cfg.flow.map) {
            const Grid2D g = cfg.sample_grid();
            const FlowMap fm = flow_map(F, g, cfg.flow.t, cfg.dt, true);
            const std::string file = "flow_map_" + std::string(label) + ".csv";
            write_flow_map_csv((cfg.output / file).string(), fm);
            double worst = 0.0;
            std::size_t checked = 0;
            for (int j = 1; j + 1 < g.ny(); ++j)
                for (int i = 1; i + 1 < g.nx(); ++i) {
                    if (fm.escaped(i, j)) continue;
                    try {
                        const double det = jacobian_det_fd(fm, i, j);
                        const double xi = fm.densities[g.index(i, j)];
                        const double excess = std::abs(xi - det) / std::max(1e-3, 1e-2 * std::abs(det));
                        worst = std::max(worst, excess);
                        if (excess > 1.0) ++liouville_violations;
                        ++checked;
                    } catch (const DomainError&) {
                    }
                }
            double C = 1.0;
            try {
                C = compressibility_estimate(fm);
            } catch (const Error&) {
                C = NAN;
            }
            summary["map"] = {{"file", file},
                              {"escaped", fm.escaped_count()},
                              {"compressibility", C},
                              {"liouville_nodes", checked},
                              {"liouville_worst_ratio", worst}};
            out << label << ": flow map at t=" << num(cfg.flow.t) << ", C=" << num(C) << ", escaped "
                << fm.escaped_count() << ", Liouville worst |xi - det| / bound " << num(worst) << "\n";
        }
        fields[label] = summary;
    }
    write_text(cfg.output / "flow.json", dump_json({{"pair", cfg.pair}, {"fields", fields}}));
    if (liouville_violations > 0) {
        err << liouville_violations << " nodes where the density disagrees with the Jacobian determinant\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_levelset(const Scenario& sc, std::ostream& out, std::ostream& err) {
    const ScenarioConfig& cfg = sc.cfg;
    const VectorField& F = sc.pick(cfg.levelset.field);
    const Grid2D g = cfg.field_grid();
    const int bi = std::clamp(static_cast<int>(std::lround((cfg.levelset.base.x - g.xmin()) / g.hx())), 0, g.nx() - 1);
    const int bj = std::clamp(static_cast<int>(std::lround((cfg.levelset.base.y - g.ymin()) / g.hy())), 0, g.ny() - 1);
    const Point2 base = g.node(bi, bj);
    HamiltonianResult H = [&] {
        try {
            return reconstruct_hamiltonian(F, g, base);
        } catch (const ModelError& e) {
            err << "field " << cfg.levelset.field << " has no Hamiltonian on the grid: " << e.what() << "\n";
            throw;
        }
    }();
    std::vector<double> levels = cfg.levelset.levels;
    if (levels.empty()) {
        const auto* s = H.H.samples();
        const auto [lo, hi] = std::minmax_element(s->values.begin(), s->values.end());
        for (int k = 1; k <= 5; ++k) levels.push_back(*lo + (*hi - *lo) * k / 6.0);
    }
    Json out_levels = Json::array();
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const LevelSetDecomposition d = extract_level_set(H.H, levels[li], g, &F);
        Json curves = Json::array();
        for (std::size_t ci = 0; ci < d.curves.size(); ++ci) {
            const LevelCurve& c = d.curves[ci];
            const std::string file = "curve_" + std::to_string(li) + "_" + std::to_string(ci) + ".csv";
            write_curve_csv((cfg.output / file).string(), c);
            Json period_value = nullptr;
            try {
                period_value = period(F, c);
            } catch (const SingularError&) {
            }
            curves.push_back({{"file", file},
                              {"vertices", c.vertices.size()},
                              {"length", c.length},
                              {"orientation", c.orientation},
                              {"min_speed", min_speed_on_curve(F, c)},
                              {"period", period_value}});
        }
        out << "level " << num(levels[li]) << ": " << d.curves.size() << " closed curve(s), "
            << d.discarded_open_chains << " boundary chain(s) discarded\n";
        Json min_speed = nullptr;
        if (d.min_speed) min_speed = *d.min_speed;
        out_levels.push_back({{"level", levels[li]},
                              {"contoured_level", d.contoured_level},
                              {"discarded_open_chains", d.discarded_open_chains},
                              {"min_speed", min_speed},
                              {"curves", curves}});
    }
    write_text(cfg.output / "levelset.json",
               dump_json({{"pair", cfg.pair},
                          {"field", cfg.levelset.field},
                          {"base", {base.x, base.y}},
                          {"residual", H.residual},
                          {"pointwise_residual", H.pointwise_residual},
                          {"levels", out_levels}}));
    out << "Hamiltonian residual " << num(H.residual) << " (pointwise " << num(H.pointwise_residual) << ")\n";
    return kExitOk;
}

int cmd_stability(const Scenario& sc, std::ostream& out, std::ostream& err) {
    const ScenarioConfig& cfg = sc.cfg;
    const VectorField& F = sc.pick(cfg.stability.field);
    const auto rows = stability_check(F, cfg.stability.eps, cfg.stability.t, cfg.field_grid(), cfg.dt);
    std::ofstream csv(cfg.output / "stability.csv");
    csv << "eps,mean_distance,max_distance,escaped\n";
    Json jrows = Json::array();
    bool decreasing = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        csv << num(r.eps, 17) << "," << num(r.mean_distance, 17) << "," << num(r.max_distance, 17) << "," << r.escaped
            << "\n";
        jrows.push_back({{"eps", r.eps}, {"mean_distance", r.mean_distance}, {"max_distance", r.max_distance},
                         {"escaped", r.escaped}});
        out << "eps " << std::left << std::setw(8) << num(r.eps) << " mean " << std::setw(14) << num(r.mean_distance)
            << " max " << num(r.max_distance) << "\n";
        // Distances already at roundoff (e.g. linear fields, which mollification
        // leaves unchanged) count as converged.
        constexpr double floor = 1e-12;
        if (k > 0 && !(r.mean_distance < rows[k - 1].mean_distance) &&
            std::max(r.mean_distance, rows[k - 1].mean_distance) > floor)
            decreasing = false;
    }
    write_text(cfg.output / "stability.json", dump_json({{"pair", cfg.pair},
                                                         {"field", cfg.stability.field},
                                                         {"t", cfg.stability.t},
                                                         {"rows", jrows},
                                                         {"monotone", decreasing}}));
    if (!decreasing) {
        err << "flow distance does not decrease with eps\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"flowlab: commuting flows of planar vector fields"};
    app.fallthrough();
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "scenario JSON");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--expect", o.expect, "expected commute verdict")->check(CLI::IsMember({"commuting", "not-commuting"}));
    app.add_option("--pair", o.pair, "catalog pair, in place of or overriding the config pair");
    app.add_option("--seed", o.seed, "reserved; every pipeline is deterministic");
    app.add_option("--quad", o.quad, "quadrature cells per bump side");
    app.add_option("--dt", o.dt, "RK4 step");
    const char* names[] = {"bracket", "flow", "levelset", "commute", "stability", "catalog"};
    const char* help[] = {"bracket pairings, Hamiltonian form and T_t table",
                          "trajectories and flow maps with Liouville check",
                          "Hamiltonian level curves and periods",
                          "full commutativity report",
                          "mollification stability study",
                          "list built-in pairs and fields"};
    for (int k = 0; k < 6; ++k) app.add_subcommand(names[k], help[k]);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitConfigError;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "catalog") return cmd_catalog(out);
        const Scenario sc = make_scenario(o);
        if (cmd == "commute") return cmd_commute(sc, o, out, err);
        if (cmd == "bracket") return cmd_bracket(sc, out, err);
        if (cmd == "flow") return cmd_flow(sc, out, err);
        if (cmd == "levelset") return cmd_levelset(sc, out, err);
        return cmd_stability(sc, out, err);
    } catch (const ConfigError& e) {
        err << (e.pointer().empty() ? "config error: " : "config error at ") << e.what() << "\n";
        return kExitConfigError;
    } catch (const ModelError&) {
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

}  // namespace flowlab
