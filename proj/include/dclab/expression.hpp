#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "dclab/periodic.hpp"

namespace dclab {

// Variable bindings for expression evaluation. All six names are always
// bindable; an expression only reads the ones it mentions.
struct VarBindings {
    double x = 0.0, y = 0.0, t = 0.0;
    double rho = 0.0, theta = 0.0, r = 0.0;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, size_t column)
        : std::runtime_error(what), column(column) {}
    size_t column;  // 0-based offset into the source text
};

namespace detail {
struct ExprNode;
}

// Arithmetic over +, -, *, /, ^ with parentheses, the variables
// {x, y, t, rho, theta, r}, the functions
// {sin, cos, exp, sqrt, abs, re, im, conj}, the imaginary unit i, and
// numeric literals. Printing uses minimal parentheses and round-trips:
// parse(print(e)) has the same tree and the same printed form.
class Expression {
  public:
    Expression() = default;

    cplx eval(const VarBindings& v = {}) const;
    std::string print() const;
    bool empty() const { return root_ == nullptr; }

  private:
    friend Expression parse_expression(const std::string&);
    std::shared_ptr<const detail::ExprNode> root_;
};

// Recursive-descent parse with standard precedence (^ binds tightest and is
// right-associative, then unary minus, then * and /, then + and -).
// Throws ParseError with the offending column on syntax errors and on
// unknown identifiers.
Expression parse_expression(const std::string& source);

}  // namespace dclab
