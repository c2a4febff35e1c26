#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

std::string render(ParseError::Kind kind, std::size_t position, const std::string& message,
                   const std::vector<std::string>& expected, const std::string& component) {
    std::string out;
    if (!component.empty()) out += "component " + component + ": ";
    switch (kind) {
        case ParseError::Kind::Lexical: out += "lexical error"; break;
        case ParseError::Kind::Syntax: out += "syntax error"; break;
        case ParseError::Kind::UnknownIdentifier: out += "unknown identifier"; break;
    }
    out += " at position " + std::to_string(position) + ": " + message;
    if (!expected.empty()) {
        out += " (expected one of:";
        for (const auto& e : expected) out += " " + e;
        out += ")";
    }
    return out;
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t position, std::string message,
                       std::vector<std::string> expected, std::string component)
    : Error(render(kind, position, message, expected, component)),
      kind_(kind),
      position_(position),
      message_(std::move(message)),
      expected_(std::move(expected)),
      component_(std::move(component)) {}

ParseError ParseError::with_component(const std::string& component) const {
    return ParseError(kind_, position_, message_, expected_, component);
}

}  // namespace flowlab
