#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "flowlab/commute.hpp"
#include "flowlab/field.hpp"

namespace flowlab {

struct BuiltinInfo {
    std::string name;
    std::string formula;  // human-readable, in terms of the parameters
    std::vector<std::pair<std::string, double>> params;  // name and default
};

/// Built-in closed-form fields, each with an analytic divergence.
const std::vector<BuiltinInfo>& builtins();

/// Missing parameters take their defaults; unknown names and parameters
/// throw PreconditionError.
VectorField make_builtin(const std::string& name, const std::map<std::string, double>& params = {});

/// The same field as (u, v) source text in the expression language.
std::array<std::string, 2> builtin_source(const std::string& name,
                                          const std::map<std::string, double>& params = {});

struct FieldRecipe {
    std::string builtin;
    std::map<std::string, double> params;
};

struct CatalogEntry {
    std::string name;
    FieldRecipe X;
    FieldRecipe Y;
    Verdict expected = Verdict::Commuting;
    std::string regime;
    std::string notes;

    VectorField field_X() const;
    VectorField field_Y() const;
    /// X and Y as expression sources: {Xu, Xv, Yu, Yv}.
    std::array<std::string, 4> sources() const;
};

const std::vector<CatalogEntry>& catalog();
/// Throws PreconditionError for an unknown name.
const CatalogEntry& catalog_entry(const std::string& name);

}  // namespace flowlab
