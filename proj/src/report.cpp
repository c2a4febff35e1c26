#include "flowlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace flowlab {

namespace {

void write_string(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void write(std::string& out, const Json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                break;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            break;
        }
        case Json::value_t::string: write_string(out, j.get<std::string>()); break;
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            // Short numeric arrays stay on one line.
            const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) {
                                  return e.is_number() || e.is_null();
                              });
            out += flat ? "[" : "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (!flat) out += pad;
                write(out, j[i], depth + 1);
                if (i + 1 < j.size()) out += flat ? ", " : ",\n";
            }
            out += flat ? "]" : "\n" + close + "]";
            break;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            std::size_t i = 0;
            for (const auto& [k, v] : j.items()) {
                out += pad;
                write_string(out, k);
                out += ": ";
                write(out, v, depth + 1);
                if (++i < j.size()) out += ",\n";
            }
            out += "\n" + close + "}";
            break;
        }
        default: out += "null";
    }
}

}  // namespace

std::string dump_json(const Json& j) {
    std::string out;
    write(out, j, 0);
    out += '\n';
    return out;
}

Json report_json(const CommutativityReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"status", to_string(c.status)},
                          {"value", c.value},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    return {{"pair", r.pair},
            {"t", r.t},
            {"s", r.s},
            {"discrepancy", {{"mean", r.discrepancy.mean}, {"max", r.discrepancy.max}, {"escaped", r.discrepancy.escaped}}},
            {"bracket_max", r.bracket_max},
            {"checks", checks},
            {"verdict", to_string(r.verdict)}};
}

Json bump_json(const BumpTestFn& psi) {
    Json dir = nullptr;
    if (psi.direction) dir = Json::array({psi.direction->x, psi.direction->y});
    return {{"center", {psi.center.x, psi.center.y}}, {"r", psi.radius}, {"direction", dir}};
}

}  // namespace flowlab
