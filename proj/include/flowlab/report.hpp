#pragma once

#include <string>

#include "flowlab/bump.hpp"
#include "flowlab/commute.hpp"
#include "json.hpp"

namespace flowlab {

using Json = nlohmann::ordered_json;

/// Pretty-printed JSON with two-space indentation. Floats are written with
/// 17 significant digits; non-finite floats become null.
std::string dump_json(const Json& j);

/// {pair, t, s, discrepancy: {mean, max, escaped}, bracket_max,
///  checks: [{name, status, value, tolerance, detail}], verdict}
Json report_json(const CommutativityReport& r);

/// {center, r, direction}; direction is null for scalar bumps.
Json bump_json(const BumpTestFn& psi);

}  // namespace flowlab
