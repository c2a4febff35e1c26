#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/bump.hpp"
#include "flowlab/commute.hpp"
#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab {

/// One field of a scenario: a builtin, an expression pair, or a CSV grid
/// that is mollified before use.
struct FieldSpec {
    enum class Kind { Builtin, Expression, Csv };
    Kind kind = Kind::Builtin;
    std::string builtin;
    std::map<std::string, double> params;
    std::array<std::string, 2> expr;
    std::filesystem::path csv;
    double eps = 0.0;
    std::string pointer;  // JSON pointer of the spec, for error messages
};

struct GridSize {
    int nx = 0;
    int ny = 0;
};

struct ScenarioConfig {
    std::string pair;
    FieldSpec X;
    FieldSpec Y;
    std::optional<Verdict> catalog_expectation;

    Box domain{-2, 2, -2, 2};
    GridSize field_resolution{129, 129};
    int quadrature = 161;
    GridSize sample_resolution{21, 21};
    std::vector<double> t{0.3, 0.6};
    std::vector<double> s{0.3, 0.6};
    double dt = 1e-3;
    double quad_dt = 1e-2;  // flows inside quadrature integrands
    Tolerances tol;
    std::vector<BumpTestFn> bumps = bump_family(0.75, 0.6);
    std::filesystem::path output = "flowlab-out";

    struct Flow {
        std::vector<Point2> starts{{1, 0}, {0.5, 0.5}};
        double t = 1.0;
        bool map = true;
    } flow;
    struct Levelset {
        std::vector<double> levels;  // empty: five levels spread over the range of H
        Point2 base{0, 0};
        std::string field = "X";
    } levelset;
    struct Stability {
        std::vector<double> eps{0.4, 0.2, 0.1};
        double t = 1.0;
        std::string field = "X";
    } stability;
    struct Bracket {
        std::vector<double> t{0.25, 0.5, 1.0};
    } bracket;

    Grid2D field_grid() const;
    Grid2D sample_grid() const;
    ReportConfig report_config() const;
};

/// Defaults for a catalog pair. Throws ConfigError for an unknown name.
ScenarioConfig catalog_config(const std::string& pair);

/// Strict parse of JSON text: unknown keys, wrong types and out-of-range
/// values throw ConfigError naming the JSON pointer. Relative CSV paths
/// resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file; unreadable files throw ConfigError at "".
ScenarioConfig load_config(const std::filesystem::path& path);

/// Builds X or Y. Expression parse errors and unresolvable CSV input are
/// reported as ConfigError at the field's pointer.
VectorField build_field(const FieldSpec& spec, const ScenarioConfig& cfg, const std::string& label);

}  // namespace flowlab
