#include "aecurv/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace aecurv {

ExprPtr make_constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::constant;
    e->number = v;
    return e;
}

ExprPtr make_variable(int index0) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::variable;
    e->var = index0;
    return e;
}

ExprPtr make_radius() {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::radius;
    return e;
}

ExprPtr make_parameter(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::parameter;
    e->name = std::move(name);
    return e;
}

ExprPtr make_unary(UnaryOp op, ExprPtr sub) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::unary;
    e->uop = op;
    e->lhs = std::move(sub);
    return e;
}

ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::binary;
    e->bop = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr make_power(ExprPtr sub, double p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::power;
    e->number = p;
    e->lhs = std::move(sub);
    return e;
}

// ------------------------------------------------------------------ parser

namespace {

struct Token {
    enum class Kind { number, ident, op, end } kind;
    double number = 0.0;
    std::string text;
    int line = 1, col = 1;
    char op = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void error(const std::string& msg, const Token& at) const {
        std::ostringstream os;
        os << "parse error at line " << at.line << ", column " << at.col << ": " << msg;
        fail(ErrorKind::parse, os.str());
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            if (s_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
            ++pos_;
        }
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::Kind::end;
            return;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.data() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail_here("malformed number");
            std::size_t len = static_cast<std::size_t>(end - begin);
            tok_.kind = Token::Kind::number;
            tok_.number = v;
            tok_.text = s_.substr(pos_, len);
            pos_ += len;
            col_ += static_cast<int>(len);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                ++pos_;
                ++col_;
            }
            tok_.kind = Token::Kind::ident;
            tok_.text = s_.substr(start, pos_ - start);
            return;
        }
        if (std::string("+-*/^()").find(c) != std::string::npos) {
            tok_.kind = Token::Kind::op;
            tok_.op = c;
            tok_.text = std::string(1, c);
            ++pos_;
            ++col_;
            return;
        }
        fail_here(std::string("unexpected character '") + c + "'");
    }

    [[noreturn]] void fail_here(const std::string& msg) const {
        std::ostringstream os;
        os << "parse error at line " << line_ << ", column " << col_ << ": " << msg;
        fail(ErrorKind::parse, os.str());
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class Parser {
public:
    explicit Parser(const std::string& s) : lex_(s) {}

    ExprPtr run() {
        ExprPtr e = expr();
        if (lex_.peek().kind != Token::Kind::end)
            lex_.error("unexpected trailing input '" + lex_.peek().text + "'", lex_.peek());
        return e;
    }

private:
    bool is_op(char c) const {
        return lex_.peek().kind == Token::Kind::op && lex_.peek().op == c;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (is_op('+') || is_op('-')) {
            char op = lex_.take().op;
            e = make_binary(op == '+' ? BinaryOp::add : BinaryOp::sub, e, term());
        }
        return e;
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (is_op('*') || is_op('/')) {
            char op = lex_.take().op;
            e = make_binary(op == '*' ? BinaryOp::mul : BinaryOp::div, e, factor());
        }
        return e;
    }

    ExprPtr factor() {
        ExprPtr b = base();
        if (is_op('^')) {
            lex_.take();
            return make_power(b, exponent());
        }
        return b;
    }

    double exponent() {
        bool paren = false;
        if (is_op('(')) {
            paren = true;
            lex_.take();
        }
        double sign = 1.0;
        if (is_op('-')) {
            sign = -1.0;
            lex_.take();
        } else if (is_op('+')) {
            lex_.take();
        }
        if (lex_.peek().kind != Token::Kind::number)
            lex_.error("exponent must be a number", lex_.peek());
        double v = sign * lex_.take().number;
        if (paren) {
            if (!is_op(')')) lex_.error("expected ')' after exponent", lex_.peek());
            lex_.take();
        }
        return v;
    }

    ExprPtr base() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::number) return make_constant(lex_.take().number);
        if (t.kind == Token::Kind::ident) {
            Token id = lex_.take();
            if (is_op('(')) {
                UnaryOp op;
                if (id.text == "sqrt") op = UnaryOp::sqrt_fn;
                else if (id.text == "exp") op = UnaryOp::exp_fn;
                else if (id.text == "log") op = UnaryOp::log_fn;
                else lex_.error("'" + id.text + "' is not a function (arity error)", id);
                lex_.take();
                ExprPtr arg = expr();
                if (!is_op(')')) lex_.error("expected ')' closing call", lex_.peek());
                lex_.take();
                return make_unary(op, arg);
            }
            return resolve_ident(id);
        }
        if (is_op('(')) {
            lex_.take();
            ExprPtr e = expr();
            if (!is_op(')')) lex_.error("expected ')'", lex_.peek());
            lex_.take();
            return e;
        }
        if (is_op('-')) {
            lex_.take();
            return make_unary(UnaryOp::neg, factor());
        }
        lex_.error("expected number, identifier, '(' or '-', got '" + t.text + "'", t);
    }

    ExprPtr resolve_ident(const Token& id) {
        const std::string& s = id.text;
        if (s == "r") return make_radius();
        if (s == "sqrt" || s == "exp" || s == "log")
            lex_.error("function '" + s + "' needs an argument (arity error)", id);
        if (s.size() >= 2 && s[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) { digits = false; break; }
            if (digits) {
                int idx = std::atoi(s.c_str() + 1);
                if (idx < 1 || idx > kMaxDim)
                    lex_.error("unknown identifier '" + s + "' (coordinates are x1..x8)", id);
                return make_variable(idx - 1);
            }
        }
        return make_parameter(s);
    }

    Lexer lex_;
};

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::binary:
            return (e.bop == BinaryOp::add || e.bop == BinaryOp::sub) ? 1 : 2;
        case Expr::Kind::unary:
            return e.uop == UnaryOp::neg ? 3 : 5;
        case Expr::Kind::power:
            return 4;
        default:
            return 5;
    }
}

void print_rec(const Expr& e, std::ostream& os, int parent_prec, bool right_operand) {
    const int prec = precedence(e);
    bool need = prec < parent_prec || (prec == parent_prec && right_operand);
    switch (e.kind) {
        case Expr::Kind::constant: {
            if (e.number < 0) {
                os << '(' << e.number << ')';
            } else {
                std::ostringstream tmp;
                tmp.precision(17);
                tmp << e.number;
                os << tmp.str();
            }
            return;
        }
        case Expr::Kind::variable:
            os << 'x' << (e.var + 1);
            return;
        case Expr::Kind::radius:
            os << 'r';
            return;
        case Expr::Kind::parameter:
            os << e.name;
            return;
        case Expr::Kind::unary: {
            if (e.uop == UnaryOp::neg) {
                if (need) os << '(';
                os << '-';
                print_rec(*e.lhs, os, prec, true);
                if (need) os << ')';
            } else {
                os << (e.uop == UnaryOp::sqrt_fn ? "sqrt" : e.uop == UnaryOp::exp_fn ? "exp" : "log");
                os << '(';
                print_rec(*e.lhs, os, 0, false);
                os << ')';
            }
            return;
        }
        case Expr::Kind::binary: {
            if (need) os << '(';
            print_rec(*e.lhs, os, prec, false);
            switch (e.bop) {
                case BinaryOp::add: os << " + "; break;
                case BinaryOp::sub: os << " - "; break;
                case BinaryOp::mul: os << "*"; break;
                case BinaryOp::div: os << "/"; break;
            }
            print_rec(*e.rhs, os, prec, true);
            if (need) os << ')';
            return;
        }
        case Expr::Kind::power: {
            if (need) os << '(';
            print_rec(*e.lhs, os, prec + 1, false); // base binds tighter than '^'
            os << '^';
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e.number;
            std::string x = tmp.str();
            if (e.number < 0) os << '(' << x << ')';
            else os << x;
            if (need) os << ')';
            return;
        }
    }
}

} // namespace

ExprPtr parse_expr(const std::string& text) {
    return Parser(text).run();
}

std::string pretty_print(const Expr& e) {
    std::ostringstream os;
    os.precision(17);
    print_rec(e, os, 0, false);
    return os.str();
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::constant: return a.number == b.number;
        case Expr::Kind::variable: return a.var == b.var;
        case Expr::Kind::radius: return true;
        case Expr::Kind::parameter: return a.name == b.name;
        case Expr::Kind::unary: return a.uop == b.uop && expr_equal(*a.lhs, *b.lhs);
        case Expr::Kind::binary:
            return a.bop == b.bop && expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
        case Expr::Kind::power: return a.number == b.number && expr_equal(*a.lhs, *b.lhs);
    }
    return false;
}

int max_variable(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::variable: return e.var + 1;
        case Expr::Kind::unary:
        case Expr::Kind::power: return max_variable(*e.lhs);
        case Expr::Kind::binary:
            return std::max(max_variable(*e.lhs), max_variable(*e.rhs));
        default: return 0;
    }
}

bool contains_radius(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::radius: return true;
        case Expr::Kind::unary:
        case Expr::Kind::power: return contains_radius(*e.lhs);
        case Expr::Kind::binary:
            return contains_radius(*e.lhs) || contains_radius(*e.rhs);
        default: return false;
    }
}

EvalContext::EvalContext(std::span<const double> point, int order,
                         const std::map<std::string, double>& params)
    : dim_(static_cast<int>(point.size())),
      order_(order),
      point_(point.begin(), point.end()),
      params_(params) {
    if (order_ < 0 || order_ > kMaxJetOrder)
        fail(ErrorKind::order, "evaluation order must be in [0, 5], got " + std::to_string(order_));
}

Jet EvalContext::eval(const ExprPtr& e) {
    if (!e) fail(ErrorKind::parse, "null expression");
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Jet out;
    switch (e->kind) {
        case Expr::Kind::constant:
            out = Jet::constant(dim_, order_, e->number);
            break;
        case Expr::Kind::variable:
            if (e->var >= dim_)
                fail(ErrorKind::domain, "expression uses x" + std::to_string(e->var + 1) +
                                            " but dimension is " + std::to_string(dim_));
            out = Jet::coordinate(dim_, order_, e->var, point_[static_cast<std::size_t>(e->var)]);
            break;
        case Expr::Kind::radius: {
            if (!have_radius_) {
                Jet r2 = Jet::constant(dim_, order_, 0.0);
                for (int i = 0; i < dim_; ++i) {
                    Jet xi = Jet::coordinate(dim_, order_, i, point_[static_cast<std::size_t>(i)]);
                    r2 += xi * xi;
                }
                if (r2.value() <= 0.0)
                    fail(ErrorKind::domain, "r is singular at the origin");
                radius_ = jet_sqrt(r2);
                have_radius_ = true;
            }
            out = radius_;
            break;
        }
        case Expr::Kind::parameter: {
            auto p = params_.find(e->name);
            if (p == params_.end())
                fail(ErrorKind::config, "unknown identifier '" + e->name + "' (unbound parameter)");
            out = Jet::constant(dim_, order_, p->second);
            break;
        }
        case Expr::Kind::unary: {
            Jet sub = eval(e->lhs);
            switch (e->uop) {
                case UnaryOp::neg: out = -sub; break;
                case UnaryOp::sqrt_fn: out = jet_sqrt(sub); break;
                case UnaryOp::exp_fn: out = jet_exp(sub); break;
                case UnaryOp::log_fn: out = jet_log(sub); break;
            }
            break;
        }
        case Expr::Kind::binary: {
            Jet a = eval(e->lhs);
            Jet b = eval(e->rhs);
            switch (e->bop) {
                case BinaryOp::add: out = a + b; break;
                case BinaryOp::sub: out = a - b; break;
                case BinaryOp::mul: out = a * b; break;
                case BinaryOp::div:
                    if (b.value() == 0.0) fail(ErrorKind::domain, "division by zero in expression");
                    out = a / b;
                    break;
            }
            break;
        }
        case Expr::Kind::power:
            out = jet_pow(eval(e->lhs), e->number);
            break;
    }
    memo_.emplace(e.get(), out);
    return out;
}

Jet eval_jet(const ExprPtr& e, std::span<const double> point, int order,
             const std::map<std::string, double>& params) {
    EvalContext ctx(point, order, params);
    return ctx.eval(e);
}

} // namespace aecurv
