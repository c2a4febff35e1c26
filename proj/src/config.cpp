#include "flowlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "flowlab/catalog.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/expr.hpp"
#include "flowlab/field_io.hpp"
#include "flowlab/mollify.hpp"
#include "json.hpp"

namespace flowlab {

namespace {

using nlohmann::json;

constexpr int kMinResolution = 16;

// A JSON value together with its pointer, so every complaint can say where.
struct At {
    const json& j;
    std::string ptr;

    At operator[](const std::string& key) const { return {j.at(key), ptr + "/" + escape(key)}; }
    At operator[](std::size_t i) const { return {j.at(i), ptr + "/" + std::to_string(i)}; }
    bool has(const std::string& key) const { return j.contains(key); }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(ptr.empty() ? "/" : ptr, msg); }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~')
                out += "~0";
            else if (c == '/')
                out += "~1";
            else
                out += c;
        }
        return out;
    }

    const json& object(std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail("expected an object");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!ok.count(k)) (*this)[k].fail("unknown key '" + k + "'");
        return j;
    }

    double number() const {
        if (!j.is_number()) fail("expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }
    double positive() const {
        const double v = number();
        if (!(v > 0.0)) fail("must be > 0, got " + format_double(v));
        return v;
    }
    int integer() const {
        if (!j.is_number_integer()) fail("expected an integer");
        return j.get<int>();
    }
    int resolution() const {
        const int v = integer();
        if (v < kMinResolution)
            fail("resolution must be >= " + std::to_string(kMinResolution) + ", got " + std::to_string(v));
        return v;
    }
    std::string string() const {
        if (!j.is_string()) fail("expected a string");
        return j.get<std::string>();
    }
    bool boolean() const {
        if (!j.is_boolean()) fail("expected true or false");
        return j.get<bool>();
    }
    std::size_t array(std::size_t min_size = 0) const {
        if (!j.is_array()) fail("expected an array");
        if (j.size() < min_size) fail("expected at least " + std::to_string(min_size) + " entries");
        return j.size();
    }
    std::vector<double> numbers(std::size_t min_size = 1) const {
        const std::size_t n = array(min_size);
        std::vector<double> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back((*this)[i].number());
        return out;
    }
    Point2 point() const {
        if (!j.is_array() || j.size() != 2) fail("expected a point [x, y]");
        return {(*this)[0].number(), (*this)[1].number()};
    }
};

FieldSpec parse_field(const At& at) {
    FieldSpec f;
    f.pointer = at.ptr;
    const json& o = at.object({"builtin", "params", "expr", "csv", "eps"});
    const int kinds = o.contains("builtin") + o.contains("expr") + o.contains("csv");
    if (kinds != 1) at.fail("a field needs exactly one of 'builtin', 'expr' or 'csv'");
    if (o.contains("builtin")) {
        f.kind = FieldSpec::Kind::Builtin;
        f.builtin = at["builtin"].string();
        const auto& names = builtins();
        if (std::none_of(names.begin(), names.end(), [&](const BuiltinInfo& b) { return b.name == f.builtin; }))
            at["builtin"].fail("unknown builtin '" + f.builtin + "'");
        if (o.contains("params")) {
            const At p = at["params"];
            if (!p.j.is_object()) p.fail("expected an object");
            for (const auto& [k, v] : p.j.items()) f.params[k] = p[k].number();
            try {
                make_builtin(f.builtin, f.params);
            } catch (const PreconditionError& e) {
                p.fail(e.what());
            }
        }
    } else if (o.contains("params")) {
        at["params"].fail("'params' only applies to builtin fields");
    }
    if (o.contains("expr")) {
        f.kind = FieldSpec::Kind::Expression;
        const At e = at["expr"];
        if (!e.j.is_array() || e.j.size() != 2) e.fail("expected [u, v] expression strings");
        f.expr = {e[0].string(), e[1].string()};
    }
    if (o.contains("csv")) {
        f.kind = FieldSpec::Kind::Csv;
        f.csv = at["csv"].string();
        if (!o.contains("eps")) at.fail("mollification required for sampled fields: missing 'eps'");
        f.eps = at["eps"].positive();
    } else if (o.contains("eps")) {
        at["eps"].fail("'eps' only applies to CSV fields");
    }
    return f;
}

GridSize parse_grid_size(const At& at) {
    if (at.j.is_number_integer()) {
        const int n = at.resolution();
        return {n, n};
    }
    at.object({"nx", "ny"});
    if (!at.has("nx") || !at.has("ny")) at.fail("expected an integer or {nx, ny}");
    return {at["nx"].resolution(), at["ny"].resolution()};
}

void parse_tolerances(const At& at, Tolerances& tol) {
    at.object({"bracket", "discrepancy", "bracket_gap", "discrepancy_gap", "identity", "derivative", "wedge",
               "transport", "confinement", "steady", "alpha", "tau", "vanishing"});
    const std::pair<const char*, double*> fields[] = {
        {"bracket", &tol.bracket},         {"discrepancy", &tol.discrepancy}, {"bracket_gap", &tol.bracket_gap},
        {"discrepancy_gap", &tol.discrepancy_gap}, {"identity", &tol.identity}, {"derivative", &tol.derivative},
        {"wedge", &tol.wedge},             {"transport", &tol.transport},     {"confinement", &tol.confinement},
        {"steady", &tol.steady},           {"alpha", &tol.alpha},             {"tau", &tol.tau},
        {"vanishing", &tol.vanishing}};
    for (const auto& [name, slot] : fields)
        if (at.has(name)) *slot = at[name].positive();
    if (!(tol.bracket < tol.bracket_gap)) at.fail("'bracket' must be below 'bracket_gap'");
    if (!(tol.discrepancy < tol.discrepancy_gap)) at.fail("'discrepancy' must be below 'discrepancy_gap'");
}

std::vector<BumpTestFn> parse_bumps(const At& at) {
    at.object({"centers", "radii"});
    if (!at.has("centers") || !at.has("radii")) at.fail("bumps need 'centers' and 'radii'");
    const At c = at["centers"];
    const std::size_t nc = c.array(1);
    std::vector<double> radii;
    if (at["radii"].j.is_number())
        radii.push_back(at["radii"].positive());
    else
        for (std::size_t i = 0; i < at["radii"].array(1); ++i) radii.push_back(at["radii"][i].positive());
    std::vector<BumpTestFn> out;
    for (std::size_t i = 0; i < nc; ++i) {
        const Point2 center = c[i].point();
        for (double r : radii)
            for (Vec2 d : {Vec2{1, 0}, Vec2{0, 1}}) out.push_back(BumpTestFn::vector(center, r, d));
    }
    return out;
}

std::string field_choice(const At& at) {
    const std::string v = at.string();
    if (v != "X" && v != "Y") at.fail("expected \"X\" or \"Y\"");
    return v;
}

}  // namespace

Grid2D ScenarioConfig::field_grid() const {
    return Grid2D(domain, field_resolution.nx, field_resolution.ny);
}

Grid2D ScenarioConfig::sample_grid() const {
    return Grid2D(domain, sample_resolution.nx, sample_resolution.ny);
}

ReportConfig ScenarioConfig::report_config() const {
    ReportConfig r;
    r.domain = domain;
    r.sample_nx = sample_resolution.nx;
    r.sample_ny = sample_resolution.ny;
    r.quadrature_cells = quadrature;
    r.t = t;
    r.s = s;
    r.dt = dt;
    r.bumps = bumps;
    r.tol = tol;
    return r;
}

ScenarioConfig catalog_config(const std::string& pair) {
    const CatalogEntry* entry = nullptr;
    for (const auto& e : catalog())
        if (e.name == pair) entry = &e;
    if (!entry) throw ConfigError("/pair", "unknown catalog pair '" + pair + "'");
    ScenarioConfig cfg;
    cfg.pair = pair;
    cfg.X = {FieldSpec::Kind::Builtin, entry->X.builtin, entry->X.params, {}, {}, 0.0, "/pair"};
    cfg.Y = {FieldSpec::Kind::Builtin, entry->Y.builtin, entry->Y.params, {}, {}, 0.0, "/pair"};
    cfg.catalog_expectation = entry->expected;
    return cfg;
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    const At root{doc, ""};
    root.object({"pair", "domain", "resolution", "times", "dt", "quad_dt", "tolerances", "bumps", "output",
                 "flow", "levelset", "stability", "bracket"});
    if (!root.has("pair")) root.fail("missing required key 'pair'");

    ScenarioConfig cfg;
    const At pair = root["pair"];
    if (pair.j.is_string()) {
        cfg = catalog_config(pair.string());
    } else {
        pair.object({"name", "X", "Y"});
        if (!pair.has("X") || !pair.has("Y")) pair.fail("a custom pair needs 'X' and 'Y'");
        cfg.pair = pair.has("name") ? pair["name"].string() : "custom";
        cfg.X = parse_field(pair["X"]);
        cfg.Y = parse_field(pair["Y"]);
        for (FieldSpec* f : {&cfg.X, &cfg.Y})
            if (f->kind == FieldSpec::Kind::Csv && f->csv.is_relative()) f->csv = base_dir / f->csv;
    }

    if (root.has("domain")) {
        const std::vector<double> d = root["domain"].numbers(4);
        if (d.size() != 4) root["domain"].fail("expected [xmin, xmax, ymin, ymax]");
        if (!(d[1] > d[0]) || !(d[3] > d[2])) root["domain"].fail("expected xmax > xmin and ymax > ymin");
        cfg.domain = Box{d[0], d[1], d[2], d[3]};
    }
    if (root.has("resolution")) {
        const At r = root["resolution"];
        r.object({"field", "quadrature", "samples"});
        if (r.has("field")) cfg.field_resolution = parse_grid_size(r["field"]);
        if (r.has("quadrature")) cfg.quadrature = r["quadrature"].resolution();
        if (r.has("samples")) cfg.sample_resolution = parse_grid_size(r["samples"]);
    }
    if (root.has("times")) {
        const At t = root["times"];
        t.object({"t", "s"});
        if (t.has("t")) cfg.t = t["t"].numbers();
        if (t.has("s")) cfg.s = t["s"].numbers();
    }
    if (root.has("dt")) cfg.dt = root["dt"].positive();
    if (root.has("quad_dt")) cfg.quad_dt = root["quad_dt"].positive();
    if (root.has("tolerances")) parse_tolerances(root["tolerances"], cfg.tol);
    if (root.has("bumps")) cfg.bumps = parse_bumps(root["bumps"]);
    for (std::size_t i = 0; i < cfg.bumps.size(); ++i)
        if (!cfg.domain.contains(cfg.bumps[i].support_box()))
            (root.has("bumps") ? root["bumps"] : root).fail("bump " + std::to_string(i) +
                                                            " is not supported inside the domain");
    if (root.has("output")) cfg.output = root["output"].string();

    if (root.has("flow")) {
        const At f = root["flow"];
        f.object({"starts", "t", "map"});
        if (f.has("starts")) {
            cfg.flow.starts.clear();
            for (std::size_t i = 0; i < f["starts"].array(1); ++i) cfg.flow.starts.push_back(f["starts"][i].point());
        }
        if (f.has("t")) cfg.flow.t = f["t"].number();
        if (f.has("map")) cfg.flow.map = f["map"].boolean();
    }
    if (root.has("levelset")) {
        const At l = root["levelset"];
        l.object({"levels", "base", "field"});
        if (l.has("levels")) cfg.levelset.levels = l["levels"].numbers();
        if (l.has("base")) cfg.levelset.base = l["base"].point();
        if (l.has("field")) cfg.levelset.field = field_choice(l["field"]);
    }
    if (root.has("stability")) {
        const At s = root["stability"];
        s.object({"eps", "t", "field"});
        if (s.has("eps")) {
            cfg.stability.eps = s["eps"].numbers();
            for (std::size_t i = 0; i < cfg.stability.eps.size(); ++i) {
                s["eps"][i].positive();
                if (i > 0 && !(cfg.stability.eps[i] < cfg.stability.eps[i - 1]))
                    s["eps"][i].fail("eps values must be strictly decreasing");
            }
        }
        if (s.has("t")) cfg.stability.t = s["t"].number();
        if (s.has("field")) cfg.stability.field = field_choice(s["field"]);
    }
    if (root.has("bracket")) {
        const At b = root["bracket"];
        b.object({"t"});
        if (b.has("t")) cfg.bracket.t = b["t"].numbers();
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

VectorField build_field(const FieldSpec& spec, const ScenarioConfig& cfg, const std::string& label) {
    switch (spec.kind) {
        case FieldSpec::Kind::Builtin:
            return make_builtin(spec.builtin, spec.params).renamed(label);
        case FieldSpec::Kind::Expression:
            try {
                return dsl::parse_vector_field(spec.expr[0], spec.expr[1], label);
            } catch (const ParseError& e) {
                const std::string idx = e.component() == "v" ? "1" : "0";
                throw ConfigError(spec.pointer + "/expr/" + idx, e.what());
            }
        case FieldSpec::Kind::Csv: {
            VectorField raw = [&] {
                try {
                    return load_vector_csv(spec.csv.string(), label);
                } catch (const IoError& e) {
                    throw ConfigError(spec.pointer + "/csv", e.what());
                }
            }();
            const Grid2D& source = raw.samples()->grid;
            const Grid2D grid(source.box(), cfg.field_resolution.nx, cfg.field_resolution.ny);
            try {
                return mollify(raw, spec.eps, grid).renamed(label);
            } catch (const ResolutionError& e) {
                throw ConfigError(spec.pointer + "/eps", e.what());
            }
        }
    }
    throw ConfigError(spec.pointer, "unsupported field kind");
}

}  // namespace flowlab
