#include "flowlab/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>

#include "flowlab/errors.hpp"

namespace flowlab::dsl {

Expr number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Number;
    n->value = v;
    return n;
}

Expr variable(Var v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->var = v;
    return n;
}

Expr neg(Expr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Neg;
    n->children = {std::move(a)};
    return n;
}

Expr binary(BinOp op, Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->children = {std::move(a), std::move(b)};
    return n;
}

Expr call(Func f, Expr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->children = {std::move(a)};
    return n;
}

namespace {

constexpr int kMaxDepth = 200;

struct FuncName {
    std::string_view name;
    Func func;
};
constexpr std::array<FuncName, 5> kFuncs{{{"sin", Func::Sin},
                                          {"cos", Func::Cos},
                                          {"exp", Func::Exp},
                                          {"sqrt", Func::Sqrt},
                                          {"abs", Func::Abs}}};

std::string_view func_name(Func f) {
    for (const auto& fn : kFuncs)
        if (fn.func == f) return fn.name;
    return "?";
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind = Tok::End;
    std::size_t pos = 0;
    std::string_view text;
    double value = 0.0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            while (i < src.size() && is_digit(src[i])) ++i;
            if (i < src.size() && src[i] == '.') {
                ++i;
                while (i < src.size() && is_digit(src[i])) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t k = i + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k >= src.size() || !is_digit(src[k]))
                    throw ParseError(ParseError::Kind::Lexical, k,
                                     "malformed exponent in number literal");
                while (k < src.size() && is_digit(src[k])) ++k;
                i = k;
            }
            Token t{Tok::Number, start, src.substr(start, i - start)};
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
            if (ec != std::errc() || !std::isfinite(t.value))
                throw ParseError(ParseError::Kind::Lexical, start, "number literal out of range");
            out.push_back(t);
            continue;
        }
        if (is_alpha(c)) {
            while (i < src.size() && (is_alpha(src[i]) || is_digit(src[i]))) ++i;
            out.push_back(Token{Tok::Ident, start, src.substr(start, i - start)});
            continue;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            default: {
                std::string shown;
                const auto uc = static_cast<unsigned char>(c);
                if (uc >= 0x20 && uc < 0x7f) {
                    shown = std::string("'") + c + "'";
                } else {
                    static constexpr char hex[] = "0123456789abcdef";
                    shown = std::string("byte 0x") + hex[uc >> 4] + hex[uc & 0xf];
                }
                throw ParseError(ParseError::Kind::Lexical, i, "unexpected character " + shown);
            }
        }
        out.push_back(Token{k, i, src.substr(i, 1)});
        ++i;
    }
    out.push_back(Token{Tok::End, src.size(), {}});
    return out;
}

// ---------------------------------------------------------------------------
// Pratt parser

int infix_binding_power(Tok t) {
    switch (t) {
        case Tok::Plus:
        case Tok::Minus: return 10;
        case Tok::Star:
        case Tok::Slash: return 20;
        case Tok::Caret: return 40;
        default: return -1;
    }
}

constexpr int kPrefixNegPower = 30;

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Expr parse_all() {
        Expr e = parse(0);
        if (peek().kind != Tok::End) unexpected_after_operand();
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }

    [[noreturn]] void unexpected_after_operand() const {
        std::vector<std::string> expected{"'+'", "'-'", "'*'", "'/'", "'^'"};
        if (paren_depth_ > 0) expected.push_back("')'");
        expected.push_back("end of input");
        const Token& t = peek();
        std::string msg = t.kind == Tok::RParen ? "unmatched ')'"
                                                : "unexpected '" + std::string(t.text) + "'";
        if (t.kind == Tok::Ident || t.kind == Tok::Number || t.kind == Tok::LParen)
            msg += " (implicit multiplication is not supported)";
        throw ParseError(ParseError::Kind::Syntax, t.pos, msg, expected);
    }

    void expect(Tok kind, const char* what) {
        const Token& t = peek();
        if (t.kind != kind) {
            std::string found = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
            throw ParseError(ParseError::Kind::Syntax, t.pos,
                             std::string("expected ") + what + ", found " + found, {what});
        }
        advance();
    }

    Expr parse(int min_bp) {
        if (++depth_ > kMaxDepth)
            throw ParseError(ParseError::Kind::Syntax, peek().pos, "expression nested too deeply");
        Expr lhs = parse_prefix();
        for (;;) {
            const Token& op = peek();
            const int bp = infix_binding_power(op.kind);
            if (bp < 0) {
                if (op.kind == Tok::End || (op.kind == Tok::RParen && paren_depth_ > 0)) break;
                unexpected_after_operand();
            }
            if (bp <= min_bp) break;
            advance();
            if (op.kind == Tok::Caret) {
                lhs = binary(BinOp::Pow, std::move(lhs), parse_exponent());
                continue;
            }
            Expr rhs = parse(bp);
            BinOp bop = op.kind == Tok::Plus    ? BinOp::Add
                        : op.kind == Tok::Minus ? BinOp::Sub
                        : op.kind == Tok::Star  ? BinOp::Mul
                                                : BinOp::Div;
            lhs = binary(bop, std::move(lhs), std::move(rhs));
        }
        --depth_;
        return lhs;
    }

    Expr parse_exponent() {
        const Token& t = peek();
        if (t.kind != Tok::Number || t.value != std::floor(t.value) || t.value > 1e6) {
            throw ParseError(ParseError::Kind::Syntax, t.pos,
                             "exponent must be a non-negative integer literal",
                             {"non-negative integer literal"});
        }
        advance();
        return number(t.value);
    }

    Expr parse_prefix() {
        const Token& t = advance();
        switch (t.kind) {
            case Tok::Number: return number(t.value);
            case Tok::Minus: return neg(parse(kPrefixNegPower));
            case Tok::LParen: {
                ++paren_depth_;
                Expr inner = parse(0);
                expect(Tok::RParen, "')'");
                --paren_depth_;
                return inner;
            }
            case Tok::Ident: {
                if (t.text == "x") return variable(Var::X);
                if (t.text == "y") return variable(Var::Y);
                for (const auto& fn : kFuncs) {
                    if (fn.name == t.text) {
                        expect(Tok::LParen, "'('");
                        ++paren_depth_;
                        Expr arg = parse(0);
                        expect(Tok::RParen, "')'");
                        --paren_depth_;
                        return call(fn.func, std::move(arg));
                    }
                }
                throw ParseError(ParseError::Kind::UnknownIdentifier, t.pos,
                                 "unknown identifier '" + std::string(t.text) + "'",
                                 {"x", "y", "sin", "cos", "exp", "sqrt", "abs"});
            }
            default: {
                std::string found = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
                throw ParseError(ParseError::Kind::Syntax, t.pos, "expected an operand, found " + found,
                                 {"number", "x", "y", "function call", "'('", "'-'"});
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int paren_depth_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

int precedence(const Expr& e) {
    switch (e->kind) {
        case NodeKind::Number: return e->value < 0.0 || std::signbit(e->value) ? 3 : 5;
        case NodeKind::Variable:
        case NodeKind::Call: return 5;
        case NodeKind::Neg: return 3;
        case NodeKind::Binary:
            switch (e->op) {
                case BinOp::Add:
                case BinOp::Sub: return 1;
                case BinOp::Mul:
                case BinOp::Div: return 2;
                case BinOp::Pow: return 4;
            }
    }
    return 0;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print(e, out);
    if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
    switch (e->kind) {
        case NodeKind::Number: out += format_number(e->value); return;
        case NodeKind::Variable: out += e->var == Var::X ? 'x' : 'y'; return;
        case NodeKind::Neg:
            out += '-';
            print_wrapped(e->children[0], precedence(e->children[0]) < 3, out);
            return;
        case NodeKind::Call:
            out += func_name(e->func);
            out += '(';
            print(e->children[0], out);
            out += ')';
            return;
        case NodeKind::Binary: {
            const int p = precedence(e);
            if (e->op == BinOp::Pow) {
                print_wrapped(e->children[0], precedence(e->children[0]) < 4, out);
                out += '^';
                print(e->children[1], out);
                return;
            }
            print_wrapped(e->children[0], precedence(e->children[0]) < p, out);
            switch (e->op) {
                case BinOp::Add: out += " + "; break;
                case BinOp::Sub: out += " - "; break;
                case BinOp::Mul: out += "*"; break;
                case BinOp::Div: out += "/"; break;
                case BinOp::Pow: break;
            }
            print_wrapped(e->children[1], precedence(e->children[1]) <= p, out);
            return;
        }
    }
}

bool has_variable(const Expr& e) {
    if (e->kind == NodeKind::Variable) return true;
    for (const auto& c : e->children)
        if (has_variable(c)) return true;
    return false;
}

bool is_number(const Expr& e, double v) { return e->kind == NodeKind::Number && e->value == v; }

// Constructors with constant folding of 0 and 1, used by the differentiator.
Expr s_add(Expr a, Expr b) {
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number) return number(a->value + b->value);
    return binary(BinOp::Add, std::move(a), std::move(b));
}
Expr s_neg(Expr a) {
    if (a->kind == NodeKind::Number) return number(-a->value);
    return neg(std::move(a));
}
Expr s_sub(Expr a, Expr b) {
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return s_neg(std::move(b));
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number) return number(a->value - b->value);
    return binary(BinOp::Sub, std::move(a), std::move(b));
}
Expr s_mul(Expr a, Expr b) {
    if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number) return number(a->value * b->value);
    return binary(BinOp::Mul, std::move(a), std::move(b));
}
Expr s_div(Expr a, Expr b) {
    if (is_number(a, 0.0)) return number(0.0);
    if (is_number(b, 1.0)) return a;
    return binary(BinOp::Div, std::move(a), std::move(b));
}
Expr s_pow(Expr a, double n) {
    if (n == 0.0) return number(1.0);
    if (n == 1.0) return a;
    return binary(BinOp::Pow, std::move(a), number(n));
}

}  // namespace

Expr parse_expr(std::string_view src) {
    Parser p(lex(src));
    return p.parse_all();
}

double eval_ast(const Expr& e, Point2 p) {
    switch (e->kind) {
        case NodeKind::Number: return e->value;
        case NodeKind::Variable: return e->var == Var::X ? p.x : p.y;
        case NodeKind::Neg: return -eval_ast(e->children[0], p);
        case NodeKind::Call: {
            const double a = eval_ast(e->children[0], p);
            double r = 0.0;
            switch (e->func) {
                case Func::Sin: r = std::sin(a); break;
                case Func::Cos: r = std::cos(a); break;
                case Func::Exp: r = std::exp(a); break;
                case Func::Abs: r = std::abs(a); break;
                case Func::Sqrt:
                    if (a < 0.0) throw NumericDomainError("sqrt of negative value");
                    r = std::sqrt(a);
                    break;
            }
            if (!std::isfinite(r)) throw NumericDomainError("non-finite function value");
            return r;
        }
        case NodeKind::Binary: {
            const double a = eval_ast(e->children[0], p);
            const double b = eval_ast(e->children[1], p);
            double r = 0.0;
            switch (e->op) {
                case BinOp::Add: r = a + b; break;
                case BinOp::Sub: r = a - b; break;
                case BinOp::Mul: r = a * b; break;
                case BinOp::Div:
                    if (b == 0.0) throw NumericDomainError("division by zero");
                    r = a / b;
                    break;
                case BinOp::Pow: r = std::pow(a, b); break;
            }
            if (!std::isfinite(r)) throw NumericDomainError("non-finite intermediate value");
            return r;
        }
    }
    return 0.0;
}

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Number: return a->value == b->value;
        case NodeKind::Variable: return a->var == b->var;
        case NodeKind::Call:
            if (a->func != b->func) return false;
            break;
        case NodeKind::Binary:
            if (a->op != b->op) return false;
            break;
        case NodeKind::Neg: break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!structurally_equal(a->children[i], b->children[i])) return false;
    return true;
}

bool is_polynomial(const Expr& e) {
    switch (e->kind) {
        case NodeKind::Number:
        case NodeKind::Variable: return true;
        case NodeKind::Call: return false;
        case NodeKind::Neg: return is_polynomial(e->children[0]);
        case NodeKind::Binary:
            if (e->op == BinOp::Div)
                return is_polynomial(e->children[0]) && is_polynomial(e->children[1]) &&
                       !has_variable(e->children[1]);
            return is_polynomial(e->children[0]) && is_polynomial(e->children[1]);
    }
    return false;
}

Expr differentiate(const Expr& e, Var v) {
    switch (e->kind) {
        case NodeKind::Number: return number(0.0);
        case NodeKind::Variable: return number(e->var == v ? 1.0 : 0.0);
        case NodeKind::Neg: return s_neg(differentiate(e->children[0], v));
        case NodeKind::Call:
            throw PreconditionError("symbolic differentiation is limited to polynomials");
        case NodeKind::Binary: {
            const Expr& a = e->children[0];
            const Expr& b = e->children[1];
            switch (e->op) {
                case BinOp::Add: return s_add(differentiate(a, v), differentiate(b, v));
                case BinOp::Sub: return s_sub(differentiate(a, v), differentiate(b, v));
                case BinOp::Mul:
                    return s_add(s_mul(differentiate(a, v), b), s_mul(a, differentiate(b, v)));
                case BinOp::Div:
                    if (has_variable(b))
                        throw PreconditionError("symbolic differentiation is limited to polynomials");
                    return s_div(differentiate(a, v), b);
                case BinOp::Pow: {
                    const double n = b->value;
                    if (n == 0.0) return number(0.0);
                    return s_mul(s_mul(number(n), s_pow(a, n - 1.0)), differentiate(a, v));
                }
            }
        }
    }
    return number(0.0);
}

namespace {

Expr parse_component(std::string_view src, const char* label) {
    try {
        return parse_expr(src);
    } catch (const ParseError& e) {
        throw e.with_component(label);
    }
}

// A polynomial that vanishes at these scattered points is treated as
// identically zero.
bool vanishes_identically(const Expr& e) {
    if (e->kind == NodeKind::Number) return e->value == 0.0;
    static constexpr std::array<Point2, 12> probes{{{0.31, -1.7}, {2.3, 0.45}, {-1.1, -0.6},
                                                   {0.77, 1.93}, {-2.6, 2.2}, {1.41, -2.9},
                                                   {-0.37, 0.13}, {2.9, 2.71}, {-1.9, -2.45},
                                                   {0.05, 0.61}, {-2.2, 1.05}, {1.6, -0.33}}};
    for (Point2 p : probes) {
        try {
            if (std::abs(eval_ast(e, p)) > 1e-9) return false;
        } catch (const NumericDomainError&) {
            return false;
        }
    }
    return true;
}

}  // namespace

VectorField parse_vector_field(std::string_view src_u, std::string_view src_v, std::string name) {
    Expr u = parse_component(src_u, "u");
    Expr v = parse_component(src_v, "v");
    VectorField::Options opts;
    if (is_polynomial(u) && is_polynomial(v)) {
        Expr div = s_add(differentiate(u, Var::X), differentiate(v, Var::Y));
        opts.divergence_free = vanishes_identically(div);
        if (opts.divergence_free) div = number(0.0);
        opts.divergence = ScalarField::expression(div, "div");
    }
    return VectorField::expression(std::move(u), std::move(v), std::move(name), std::move(opts));
}

ScalarField parse_scalar_field(std::string_view src, std::string name) {
    return ScalarField::expression(parse_expr(src), std::move(name));
}

}  // namespace flowlab::dsl
