#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flowlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point outside a field's domain, or too close to its edge for a stencil.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the requested operation (e.g. mollifier support).
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Division by zero, sqrt of a negative number, or a non-finite result.
class NumericDomainError : public Error {
public:
    using Error::Error;
};

/// Input violates a modelling assumption (e.g. a field that is not
/// divergence-free where one is required).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Operation called outside its documented preconditions.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Sampled regime empty or too degraded to reach a verdict.
class InconclusiveError : public Error {
public:
    using Error::Error;
};

/// Vanishing speed where a positive lower bound is needed.
class SingularError : public Error {
public:
    using Error::Error;
};

/// Point not close enough to the curve it is supposed to lie on.
class SnapError : public Error {
public:
    using Error::Error;
};

/// Unreadable or malformed data file.
class IoError : public Error {
public:
    using Error::Error;
};

/// Trajectory left the field's domain.
class EscapeError : public Error {
public:
    EscapeError(const std::string& what, double exit_time)
        : Error(what), exit_time_(exit_time) {}
    double exit_time() const { return exit_time_; }

private:
    double exit_time_;
};

/// Expression parse failure with a byte offset into the source.
class ParseError : public Error {
public:
    enum class Kind { Lexical, Syntax, UnknownIdentifier };

    ParseError(Kind kind, std::size_t position, std::string message,
               std::vector<std::string> expected = {}, std::string component = {});

    Kind kind() const { return kind_; }
    std::size_t position() const { return position_; }
    const std::string& message() const { return message_; }
    const std::vector<std::string>& expected() const { return expected_; }
    /// Field component label ("u" or "v") when raised from a vector field parse.
    const std::string& component() const { return component_; }

    ParseError with_component(const std::string& component) const;

private:
    Kind kind_;
    std::size_t position_;
    std::string message_;
    std::vector<std::string> expected_;
    std::string component_;
};

/// Invalid scenario configuration; `pointer` is a JSON pointer to the
/// offending value.
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : Error(pointer.empty() ? message : pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace flowlab
