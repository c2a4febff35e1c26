#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flowlab/geometry.hpp"

namespace flowlab {

namespace dsl {
struct Node;
using Expr = std::shared_ptr<const Node>;
}  // namespace dsl

enum class Backing { ClosedForm, Expression, Sampled };

const char* to_string(Backing b);

/// Node values on a grid; evaluation between nodes is bilinear.
template <typename T>
struct GridSamples {
    Grid2D grid;
    std::vector<T> values;  // grid.index(i, j) order

    const T& at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Immutable scalar field on the plane. Copies share state.
class ScalarField {
public:
    using Fn = std::function<double(Point2)>;

    static ScalarField closed_form(std::string name, Fn fn, std::optional<Box> domain = {});
    static ScalarField expression(dsl::Expr expr, std::string name = {});
    static ScalarField sampled(Grid2D grid, std::vector<double> values, std::string name = {});

    double operator()(Point2 p) const { return eval(p); }
    /// Throws DomainError outside the domain and NumericDomainError for
    /// non-finite values.
    double eval(Point2 p) const;

    Backing backing() const;
    const std::optional<Box>& domain() const;
    bool contains(Point2 p, double margin = 0.0) const;
    const std::string& name() const;

    const GridSamples<double>* samples() const;
    const dsl::Expr* expression_ast() const;

private:
    struct Impl;
    explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

struct VectorFieldOptions {
    std::optional<ScalarField> divergence;
    bool divergence_free = false;
    std::optional<Box> domain;
};

/// Immutable vector field on the plane with an optional analytic
/// divergence. Copies share state.
class VectorField {
public:
    using Fn = std::function<Vec2(Point2)>;
    using Options = VectorFieldOptions;

    static VectorField closed_form(std::string name, Fn fn, Options opts = {});
    static VectorField expression(dsl::Expr u, dsl::Expr v, std::string name = {},
                                  Options opts = {});
    static VectorField sampled(Grid2D grid, std::vector<Vec2> values, std::string name = {},
                               Options opts = {});

    Vec2 operator()(Point2 p) const { return eval(p); }
    Vec2 eval(Point2 p) const;

    Backing backing() const;
    const std::optional<Box>& domain() const;
    bool contains(Point2 p, double margin = 0.0) const;
    const std::string& name() const;
    const std::optional<ScalarField>& analytic_divergence() const;
    bool declared_divergence_free() const;

    const GridSamples<Vec2>* samples() const;
    /// Component expressions, for expression-backed fields.
    std::optional<std::pair<dsl::Expr, dsl::Expr>> expression_asts() const;

    /// Same evaluation, different metadata.
    VectorField renamed(std::string name) const;

private:
    struct Impl;
    explicit VectorField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Values of `field` at every node of `grid`.
std::vector<Vec2> sample_nodes(const VectorField& field, const Grid2D& grid);
std::vector<double> sample_nodes(const ScalarField& field, const Grid2D& grid);

}  // namespace flowlab
