#include "flowlab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "flowlab/errors.hpp"
#include "flowlab/field_io.hpp"

namespace flowlab {

namespace {

using Params = std::map<std::string, double>;

struct Builtin {
    BuiltinInfo info;
    std::function<VectorField(const std::vector<double>&)> make;
    std::function<std::array<std::string, 2>(const std::vector<double>&)> source;
};

VectorField linear_field(const std::string& name, double a11, double a12, double a21, double a22) {
    VectorField::Options opts;
    const double div = a11 + a22;
    opts.divergence = ScalarField::closed_form("div " + name, [div](Point2) { return div; });
    opts.divergence_free = div == 0.0;
    return VectorField::closed_form(
        name, [=](Point2 p) { return Vec2{a11 * p.x + a12 * p.y, a21 * p.x + a22 * p.y}; }, opts);
}

// Renders c * var as source text, dropping zero and unit coefficients.
std::string term(double c, const std::string& var) {
    if (c == 0.0) return {};
    if (var.empty()) return format_double(c);
    if (c == 1.0) return var;
    if (c == -1.0) return "-" + var;
    return format_double(c) + "*" + var;
}

std::string sum(const std::vector<std::string>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (t.empty()) continue;
        if (out.empty())
            out = t;
        else if (t.front() == '-')
            out += " - " + t.substr(1);
        else
            out += " + " + t;
    }
    return out.empty() ? "0" : out;
}

std::string linear_source(double a, double b) { return sum({term(a, "x"), term(b, "y")}); }

const std::vector<Builtin>& table() {
    static const std::vector<Builtin> t = {
        {{"rotation", "omega * (-y, x)", {{"omega", 1.0}}},
         [](const std::vector<double>& p) { return linear_field("rotation", 0, -p[0], p[0], 0); },
         [](const std::vector<double>& p) {
             return std::array{linear_source(0, -p[0]), linear_source(p[0], 0)};
         }},
        {{"scaling", "lambda * (x, y)", {{"lambda", 1.0}}},
         [](const std::vector<double>& p) { return linear_field("scaling", p[0], 0, 0, p[0]); },
         [](const std::vector<double>& p) {
             return std::array{linear_source(p[0], 0), linear_source(0, p[0])};
         }},
        {{"constant", "(u, v)", {{"u", 1.0}, {"v", 0.0}}},
         [](const std::vector<double>& p) {
             VectorField::Options opts;
             opts.divergence = ScalarField::closed_form("div constant", [](Point2) { return 0.0; });
             opts.divergence_free = true;
             const Vec2 c{p[0], p[1]};
             return VectorField::closed_form("constant", [c](Point2) { return c; }, opts);
         },
         [](const std::vector<double>& p) {
             return std::array{format_double(p[0]), format_double(p[1])};
         }},
        {{"cellular", "A * (-sin x cos y, cos x sin y), perp-gradient of A sin x sin y", {{"amplitude", 1.0}}},
         [](const std::vector<double>& p) {
             const double A = p[0];
             VectorField::Options opts;
             opts.divergence = ScalarField::closed_form("div cellular", [](Point2) { return 0.0; });
             opts.divergence_free = true;
             return VectorField::closed_form(
                 "cellular",
                 [A](Point2 z) {
                     return Vec2{-A * std::sin(z.x) * std::cos(z.y), A * std::cos(z.x) * std::sin(z.y)};
                 },
                 opts);
         },
         [](const std::vector<double>& p) {
             return std::array{term(-p[0], "sin(x)*cos(y)"), term(p[0], "cos(x)*sin(y)")};
         }},
        {{"shear", "(0, k x)", {{"k", 1.0}}},
         [](const std::vector<double>& p) { return linear_field("shear", 0, 0, p[0], 0); },
         [](const std::vector<double>& p) {
             return std::array{linear_source(0, 0), linear_source(p[0], 0)};
         }},
        {{"hyperbolic", "lambda * (x, -y)", {{"lambda", 1.0}}},
         [](const std::vector<double>& p) { return linear_field("hyperbolic", p[0], 0, 0, -p[0]); },
         [](const std::vector<double>& p) {
             return std::array{linear_source(p[0], 0), linear_source(0, -p[0])};
         }},
        {{"linear", "(a11 x + a12 y, a21 x + a22 y)", {{"a11", 0.0}, {"a12", 0.0}, {"a21", 0.0}, {"a22", 0.0}}},
         [](const std::vector<double>& p) { return linear_field("linear", p[0], p[1], p[2], p[3]); },
         [](const std::vector<double>& p) {
             return std::array{linear_source(p[0], p[1]), linear_source(p[2], p[3])};
         }},
    };
    return t;
}

const Builtin& lookup(const std::string& name) {
    for (const auto& b : table())
        if (b.info.name == name) return b;
    throw PreconditionError("unknown builtin field '" + name + "'");
}

std::vector<double> resolve(const Builtin& b, const Params& params) {
    for (const auto& [k, v] : params) {
        const auto& ps = b.info.params;
        if (std::none_of(ps.begin(), ps.end(), [&](const auto& p) { return p.first == k; }))
            throw PreconditionError("builtin '" + b.info.name + "' has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw PreconditionError("parameter '" + k + "' must be finite");
    }
    std::vector<double> out;
    for (const auto& [k, def] : b.info.params) {
        auto it = params.find(k);
        out.push_back(it == params.end() ? def : it->second);
    }
    return out;
}

}  // namespace

const std::vector<BuiltinInfo>& builtins() {
    static const std::vector<BuiltinInfo> infos = [] {
        std::vector<BuiltinInfo> v;
        for (const auto& b : table()) v.push_back(b.info);
        return v;
    }();
    return infos;
}

VectorField make_builtin(const std::string& name, const Params& params) {
    const Builtin& b = lookup(name);
    return b.make(resolve(b, params));
}

std::array<std::string, 2> builtin_source(const std::string& name, const Params& params) {
    const Builtin& b = lookup(name);
    return b.source(resolve(b, params));
}

VectorField CatalogEntry::field_X() const { return make_builtin(X.builtin, X.params).renamed("X"); }
VectorField CatalogEntry::field_Y() const { return make_builtin(Y.builtin, Y.params).renamed("Y"); }

std::array<std::string, 4> CatalogEntry::sources() const {
    const auto x = builtin_source(X.builtin, X.params);
    const auto y = builtin_source(Y.builtin, Y.params);
    return {x[0], x[1], y[0], y[1]};
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"scaling-rotation", {"scaling", {}}, {"rotation", {}}, Verdict::Commuting,
         "commuting, nonzero divergence",
         "phi^X_t = e^t id, phi^Y_s = rotation by s; X . perp Y = -(x^2 + y^2), xi = e^{2t}"},
        {"translations", {"constant", {{"u", 1}, {"v", 0}}}, {"constant", {{"u", 0}, {"v", 1}}},
         Verdict::Commuting, "X . perp Y constant and nonzero", "X . perp Y = -1; flows are translations"},
        {"cellular-parallel", {"cellular", {}}, {"cellular", {{"amplitude", 2}}}, Verdict::Commuting,
         "parallel, Y = 2X, Hamiltonian",
         "H = sin x sin y; phi^Y_s = phi^X_{2s}; X . perp Y = 0"},
        {"vanishing-set", {"shear", {}}, {"constant", {{"u", 0}, {"v", 1}}}, Verdict::Commuting,
         "vanishing set {x = 0}",
         "both compositions give (z1, z2 + s + t z1); X = 0 on {x = 0}, which phi^Y preserves"},
        {"shear-noncommuting", {"constant", {{"u", 1}, {"v", 0}}}, {"shear", {}}, Verdict::NotCommuting,
         "non-commuting shear",
         "[X, Y] = (0, 1); discrepancy = |s t|; e2-bump pairing = mass = pi r^2 / 4"},
        {"rotation-translation", {"rotation", {}}, {"constant", {{"u", 1}, {"v", 0}}},
         Verdict::NotCommuting, "non-commuting rotation",
         "[X, Y] = (0, -1); discrepancy = 2 s |sin(t/2)|"},
    };
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw PreconditionError("unknown catalog pair '" + name + "'");
}

}  // namespace flowlab
