#pragma once

// Field-definition language: arithmetic expressions in x and y.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' INTEGER)*
//   atom   := NUMBER | 'x' | 'y' | FUNC '(' expr ')' | '(' expr ')'
//   FUNC   := sin | cos | exp | sqrt | abs
//
// Exponents are non-negative integer literals, so repeated powers fold to
// the left: x^2^3 == (x^2)^3. There is no implicit multiplication.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "flowlab/field.hpp"
#include "flowlab/geometry.hpp"

namespace flowlab::dsl {

enum class NodeKind { Number, Variable, Neg, Binary, Call };
enum class Var { X, Y };
enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Sqrt, Abs };

struct Node {
    NodeKind kind = NodeKind::Number;
    double value = 0.0;  // Number
    Var var = Var::X;    // Variable
    BinOp op = BinOp::Add;
    Func func = Func::Sin;
    std::vector<Expr> children;  // Neg/Call: 1, Binary: 2 (Pow: base, integer Number)
};

Expr number(double v);
Expr variable(Var v);
Expr neg(Expr a);
Expr binary(BinOp op, Expr a, Expr b);
Expr call(Func f, Expr a);

/// Parses the whole input. Throws ParseError with a byte position.
Expr parse_expr(std::string_view src);

/// Exact recursive evaluation. Throws NumericDomainError on division by
/// zero, sqrt of a negative number, or a non-finite result.
double eval_ast(const Expr& e, Point2 p);

/// Minimal-parenthesis rendering that reparses to the same tree.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// True for trees built from numbers, variables, negation, +, -, *,
/// integer powers, and division by variable-free subtrees.
bool is_polynomial(const Expr& e);

/// Symbolic partial derivative of a polynomial tree. Throws
/// PreconditionError for non-polynomial input.
Expr differentiate(const Expr& e, Var v);

/// Expression-backed field; an analytic divergence is attached when both
/// components are polynomial. Parse errors carry the component label.
VectorField parse_vector_field(std::string_view src_u, std::string_view src_v,
                               std::string name = {});

ScalarField parse_scalar_field(std::string_view src, std::string name = {});

}  // namespace flowlab::dsl
