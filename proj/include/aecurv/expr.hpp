#pragma once

// Expression DSL for metric components.
//
// Grammar (whitespace-insensitive):
//   expr     := term (("+" | "-") term)*
//   term     := factor (("*" | "/") factor)*
//   factor   := base ("^" exponent)?
//   base     := number | ident | ident "(" expr ")" | "(" expr ")" | "-" factor
//   exponent := number | "-" number | "(" ("+"|"-")? number ")"
//
// Precedence: ^  >  unary -  >  * /  >  + -, all left-associative.
// Identifiers: x1..x8 are coordinates, r is sqrt(x1^2+...+xn^2), sqrt/exp/log
// are the unary functions; anything else is a named parameter resolved at
// evaluation time.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aecurv/jet.hpp"

namespace aecurv {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { neg, sqrt_fn, exp_fn, log_fn };
enum class BinaryOp { add, sub, mul, div };

struct Expr {
    enum class Kind { constant, variable, radius, parameter, unary, binary, power };

    Kind kind;
    double number = 0.0;           // constant value or power exponent
    int var = 0;                   // variable index, 0-based
    std::string name;              // parameter name
    UnaryOp uop = UnaryOp::neg;
    BinaryOp bop = BinaryOp::add;
    ExprPtr lhs, rhs;              // unary/power use lhs only
};

ExprPtr make_constant(double v);
ExprPtr make_variable(int index0);
ExprPtr make_radius();
ExprPtr make_parameter(std::string name);
ExprPtr make_unary(UnaryOp op, ExprPtr e);
ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b);
ExprPtr make_power(ExprPtr e, double p);

// Throws Error(parse) with line/column on syntax errors.
ExprPtr parse_expr(const std::string& text);

std::string pretty_print(const Expr& e);

bool expr_equal(const Expr& a, const Expr& b);

// Largest coordinate index mentioned (1-based), 0 if none.
int max_variable(const Expr& e);
bool contains_radius(const Expr& e);

class EvalContext {
public:
    EvalContext(std::span<const double> point, int order,
                const std::map<std::string, double>& params);

    Jet eval(const ExprPtr& e);

    int dim() const { return dim_; }
    int order() const { return order_; }

private:
    int dim_;
    int order_;
    std::vector<double> point_;
    const std::map<std::string, double>& params_;
    std::map<const Expr*, Jet> memo_;
    bool have_radius_ = false;
    Jet radius_;
};

// One-shot convenience wrapper.
Jet eval_jet(const ExprPtr& e, std::span<const double> point, int order,
             const std::map<std::string, double>& params);

} // namespace aecurv
