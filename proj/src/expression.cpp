#include "dclab/expression.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <sstream>

namespace dclab {

namespace detail {

enum class Kind { number, imag_unit, variable, unary_minus, binary, call };

struct ExprNode {
    Kind kind;
    double value = 0.0;     // number
    std::string name;       // variable / function name
    char op = 0;            // binary operator
    std::shared_ptr<const ExprNode> lhs, rhs;  // rhs only for binary
};

using NodePtr = std::shared_ptr<const ExprNode>;

}  // namespace detail

using detail::ExprNode;
using detail::Kind;
using detail::NodePtr;

namespace {

bool is_variable(const std::string& s) {
    return s == "x" || s == "y" || s == "t" || s == "rho" || s == "theta" ||
           s == "r";
}

bool is_function(const std::string& s) {
    return s == "sin" || s == "cos" || s == "exp" || s == "sqrt" ||
           s == "abs" || s == "re" || s == "im" || s == "conj";
}

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = sum();
        skip_space();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input", pos_);
        if (!e) throw ParseError("empty expression", 0);
        return e;
    }

  private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_]))
            ++pos_;
    }

    bool eat(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr sum() {
        NodePtr e = product();
        for (;;) {
            if (eat('+'))
                e = binary('+', e, product());
            else if (eat('-'))
                e = binary('-', e, product());
            else
                return e;
        }
    }

    NodePtr product() {
        NodePtr e = unary();
        for (;;) {
            if (eat('*'))
                e = binary('*', e, unary());
            else if (eat('/'))
                e = binary('/', e, unary());
            else
                return e;
        }
    }

    NodePtr unary() {
        if (eat('-')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::unary_minus;
            n->lhs = unary();
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) {
            // right-associative; the exponent may carry its own unary minus
            return binary('^', base, unary());
        }
        return base;
    }

    NodePtr atom() {
        skip_space();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            size_t open = pos_;
            ++pos_;
            NodePtr e = sum();
            if (!eat(')'))
                throw ParseError("unbalanced parenthesis", open);
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return number();
        if (std::isalpha((unsigned char)c)) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'",
                         pos_);
    }

    NodePtr number() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit((unsigned char)src_[pos_]) || src_[pos_] == '.'))
            ++pos_;
        // optional exponent part
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
                while (pos_ < src_.size() &&
                       std::isdigit((unsigned char)src_[pos_]))
                    ++pos_;
            } else {
                pos_ = mark;  // the 'e' belongs to something else
            }
        }
        std::string text = src_.substr(start, pos_ - start);
        try {
            size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size())
                throw ParseError("malformed number '" + text + "'", start);
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::number;
            n->value = v;
            return n;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + text + "'", start);
        }
    }

    NodePtr identifier() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "i") {
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::imag_unit;
            return n;
        }
        if (is_variable(name)) {
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::variable;
            n->name = name;
            return n;
        }
        if (is_function(name)) {
            if (!eat('('))
                throw ParseError("function '" + name +
                                     "' requires a parenthesized argument",
                                 pos_);
            NodePtr arg = sum();
            if (!eat(')'))
                throw ParseError("unbalanced parenthesis in call of '" + name +
                                     "'",
                                 start);
            auto n = std::make_shared<ExprNode>();
            n->kind = Kind::call;
            n->name = name;
            n->lhs = arg;
            return n;
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }

    static NodePtr binary(char op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<ExprNode>();
        n->kind = Kind::binary;
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    const std::string& src_;
    size_t pos_ = 0;
};

cplx eval_node(const ExprNode& n, const VarBindings& v) {
    switch (n.kind) {
        case Kind::number:
            return cplx(n.value, 0.0);
        case Kind::imag_unit:
            return cplx(0.0, 1.0);
        case Kind::variable: {
            if (n.name == "x") return cplx(v.x, 0.0);
            if (n.name == "y") return cplx(v.y, 0.0);
            if (n.name == "t") return cplx(v.t, 0.0);
            if (n.name == "rho") return cplx(v.rho, 0.0);
            if (n.name == "theta") return cplx(v.theta, 0.0);
            return cplx(v.r, 0.0);
        }
        case Kind::unary_minus:
            return -eval_node(*n.lhs, v);
        case Kind::call: {
            cplx a = eval_node(*n.lhs, v);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "sqrt") return std::sqrt(a);
            if (n.name == "abs") return cplx(std::abs(a), 0.0);
            if (n.name == "re") return cplx(a.real(), 0.0);
            if (n.name == "im") return cplx(a.imag(), 0.0);
            return std::conj(a);  // conj
        }
        case Kind::binary: {
            cplx a = eval_node(*n.lhs, v);
            cplx b = eval_node(*n.rhs, v);
            switch (n.op) {
                case '+':
                    return a + b;
                case '-':
                    return a - b;
                case '*':
                    return a * b;
                case '/':
                    return a / b;
                default:
                    return std::pow(a, b);
            }
        }
    }
    return cplx(0.0, 0.0);
}

// precedence levels for minimal-parenthesis printing
int node_prec(const ExprNode& n) {
    switch (n.kind) {
        case Kind::binary:
            if (n.op == '+' || n.op == '-') return 1;
            if (n.op == '*' || n.op == '/') return 2;
            return 4;  // ^
        case Kind::unary_minus:
            return 3;
        default:
            return 5;  // atoms
    }
}

void print_node(const ExprNode& n, std::ostream& os) {
    auto child = [&os](const ExprNode& c, int min_prec) {
        if (node_prec(c) < min_prec) {
            os << '(';
            print_node(c, os);
            os << ')';
        } else {
            print_node(c, os);
        }
    };
    switch (n.kind) {
        case Kind::number: {
            std::ostringstream tmp;
            tmp.precision(15);
            tmp << n.value;
            os << tmp.str();
            return;
        }
        case Kind::imag_unit:
            os << 'i';
            return;
        case Kind::variable:
            os << n.name;
            return;
        case Kind::unary_minus:
            os << '-';
            child(*n.lhs, 3);
            return;
        case Kind::call:
            os << n.name << '(';
            print_node(*n.lhs, os);
            os << ')';
            return;
        case Kind::binary: {
            int p = node_prec(n);
            if (n.op == '^') {
                // left operand must be an atom (^ binds above unary minus);
                // the right operand associates naturally
                child(*n.lhs, 5);
                os << '^';
                child(*n.rhs, 3);
            } else {
                child(*n.lhs, p);
                os << n.op;
                // '-' and '/' do not associate on the right
                child(*n.rhs, (n.op == '-' || n.op == '/') ? p + 1 : p);
            }
            return;
        }
    }
}

}  // namespace

cplx Expression::eval(const VarBindings& v) const {
    if (!root_) throw std::logic_error("Expression: empty");
    return eval_node(*root_, v);
}

std::string Expression::print() const {
    if (!root_) return "";
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

Expression parse_expression(const std::string& source) {
    Parser p(source);
    Expression e;
    e.root_ = p.parse();
    return e;
}

}  // namespace dclab
