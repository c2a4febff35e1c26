#include "flowlab/field.hpp"

#include <algorithm>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/expr.hpp"

namespace flowlab {

const char* to_string(Backing b) {
    switch (b) {
        case Backing::ClosedForm: return "closed-form";
        case Backing::Expression: return "expression";
        case Backing::Sampled: return "sampled";
    }
    return "?";
}

namespace {

std::string describe(Point2 p) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

// Slack for points that sit on the grid boundary up to roundoff.
double boundary_slack(const Grid2D& g) { return 1e-12 * std::max(g.box().width(), g.box().height()); }

// Cell index and fraction along one axis.
void locate(double coord, double lo, double h, int n, int& cell, double& frac) {
    double s = (coord - lo) / h;
    int c = static_cast<int>(std::floor(s));
    c = std::clamp(c, 0, n - 2);
    cell = c;
    frac = std::clamp(s - c, 0.0, 1.0);
}

template <typename T>
T bilinear(const GridSamples<T>& s, Point2 p, const std::string& name) {
    const Grid2D& g = s.grid;
    const double slack = boundary_slack(g);
    if (!(p.x >= g.xmin() - slack && p.x <= g.xmax() + slack && p.y >= g.ymin() - slack &&
          p.y <= g.ymax() + slack)) {
        throw DomainError("point " + describe(p) + " outside sampled field '" + name + "'");
    }
    int i = 0, j = 0;
    double fx = 0.0, fy = 0.0;
    locate(p.x, g.xmin(), g.hx(), g.nx(), i, fx);
    locate(p.y, g.ymin(), g.hy(), g.ny(), j, fy);
    const T& v00 = s.at(i, j);
    const T& v10 = s.at(i + 1, j);
    const T& v01 = s.at(i, j + 1);
    const T& v11 = s.at(i + 1, j + 1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

void check_finite(double v, Point2 p, const std::string& name) {
    if (!std::isfinite(v))
        throw NumericDomainError("non-finite value of '" + name + "' at " + describe(p));
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarField

struct ScalarField::Impl {
    struct Closed {
        Fn fn;
    };
    struct Expression {
        dsl::Expr expr;
    };
    std::variant<Closed, Expression, GridSamples<double>> backing;
    std::optional<Box> domain;
    std::string name;
};

ScalarField ScalarField::closed_form(std::string name, Fn fn, std::optional<Box> domain) {
    return ScalarField(std::make_shared<const Impl>(
        Impl{Impl::Closed{std::move(fn)}, domain, std::move(name)}));
}

ScalarField ScalarField::expression(dsl::Expr expr, std::string name) {
    if (name.empty()) name = dsl::to_string(expr);
    return ScalarField(std::make_shared<const Impl>(
        Impl{Impl::Expression{std::move(expr)}, std::nullopt, std::move(name)}));
}

ScalarField ScalarField::sampled(Grid2D grid, std::vector<double> values, std::string name) {
    if (values.size() != grid.size())
        throw DomainError("sampled scalar field: expected " + std::to_string(grid.size()) +
                          " values, got " + std::to_string(values.size()));
    Box box = grid.box();
    return ScalarField(std::make_shared<const Impl>(
        Impl{GridSamples<double>{std::move(grid), std::move(values)}, box, std::move(name)}));
}

double ScalarField::eval(Point2 p) const {
    const Impl& im = *impl_;
    double v = 0.0;
    if (auto* c = std::get_if<Impl::Closed>(&im.backing)) {
        if (im.domain && !im.domain->contains(p))
            throw DomainError("point " + describe(p) + " outside domain of '" + im.name + "'");
        v = c->fn(p);
    } else if (auto* e = std::get_if<Impl::Expression>(&im.backing)) {
        v = dsl::eval_ast(e->expr, p);
    } else {
        v = bilinear(std::get<GridSamples<double>>(im.backing), p, im.name);
    }
    check_finite(v, p, im.name);
    return v;
}

Backing ScalarField::backing() const { return static_cast<Backing>(impl_->backing.index()); }
const std::optional<Box>& ScalarField::domain() const { return impl_->domain; }
bool ScalarField::contains(Point2 p, double margin) const {
    return !impl_->domain || impl_->domain->contains(p, margin);
}
const std::string& ScalarField::name() const { return impl_->name; }
const GridSamples<double>* ScalarField::samples() const {
    return std::get_if<GridSamples<double>>(&impl_->backing);
}
const dsl::Expr* ScalarField::expression_ast() const {
    auto* e = std::get_if<Impl::Expression>(&impl_->backing);
    return e ? &e->expr : nullptr;
}

// ---------------------------------------------------------------------------
// VectorField

struct VectorField::Impl {
    struct Closed {
        Fn fn;
    };
    struct Expression {
        dsl::Expr u;
        dsl::Expr v;
    };
    std::variant<Closed, Expression, GridSamples<Vec2>> backing;
    Options opts;
    std::string name;
};

VectorField VectorField::closed_form(std::string name, Fn fn, Options opts) {
    return VectorField(std::make_shared<const Impl>(
        Impl{Impl::Closed{std::move(fn)}, std::move(opts), std::move(name)}));
}

VectorField VectorField::expression(dsl::Expr u, dsl::Expr v, std::string name, Options opts) {
    if (name.empty()) name = "(" + dsl::to_string(u) + ", " + dsl::to_string(v) + ")";
    return VectorField(std::make_shared<const Impl>(
        Impl{Impl::Expression{std::move(u), std::move(v)}, std::move(opts), std::move(name)}));
}

VectorField VectorField::sampled(Grid2D grid, std::vector<Vec2> values, std::string name,
                                 Options opts) {
    if (values.size() != grid.size())
        throw DomainError("sampled vector field: expected " + std::to_string(grid.size()) +
                          " values, got " + std::to_string(values.size()));
    opts.domain = grid.box();
    return VectorField(std::make_shared<const Impl>(Impl{
        GridSamples<Vec2>{std::move(grid), std::move(values)}, std::move(opts), std::move(name)}));
}

Vec2 VectorField::eval(Point2 p) const {
    const Impl& im = *impl_;
    Vec2 v;
    if (auto* s = std::get_if<GridSamples<Vec2>>(&im.backing)) {
        v = bilinear(*s, p, im.name);
    } else {
        if (im.opts.domain && !im.opts.domain->contains(p))
            throw DomainError("point " + describe(p) + " outside domain of '" + im.name + "'");
        if (auto* c = std::get_if<Impl::Closed>(&im.backing))
            v = c->fn(p);
        else {
            const auto& e = std::get<Impl::Expression>(im.backing);
            v = {dsl::eval_ast(e.u, p), dsl::eval_ast(e.v, p)};
        }
    }
    check_finite(v.x, p, im.name);
    check_finite(v.y, p, im.name);
    return v;
}

Backing VectorField::backing() const { return static_cast<Backing>(impl_->backing.index()); }
const std::optional<Box>& VectorField::domain() const { return impl_->opts.domain; }
bool VectorField::contains(Point2 p, double margin) const {
    return !impl_->opts.domain || impl_->opts.domain->contains(p, margin);
}
const std::string& VectorField::name() const { return impl_->name; }
const std::optional<ScalarField>& VectorField::analytic_divergence() const {
    return impl_->opts.divergence;
}
bool VectorField::declared_divergence_free() const { return impl_->opts.divergence_free; }

const GridSamples<Vec2>* VectorField::samples() const {
    return std::get_if<GridSamples<Vec2>>(&impl_->backing);
}

std::optional<std::pair<dsl::Expr, dsl::Expr>> VectorField::expression_asts() const {
    if (auto* e = std::get_if<Impl::Expression>(&impl_->backing)) return std::pair{e->u, e->v};
    return std::nullopt;
}

VectorField VectorField::renamed(std::string name) const {
    Impl copy = *impl_;
    copy.name = std::move(name);
    return VectorField(std::make_shared<const Impl>(std::move(copy)));
}

std::vector<Vec2> sample_nodes(const VectorField& field, const Grid2D& grid) {
    std::vector<Vec2> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = field(grid.node(k));
    return out;
}

std::vector<double> sample_nodes(const ScalarField& field, const Grid2D& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = field(grid.node(k));
    return out;
}

}  // namespace flowlab
