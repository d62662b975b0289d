#include "psiest/expr.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include "psiest/error.hpp"
#include "psiest/format.hpp"

namespace psiest {

struct Expr::Node {
  Op op = Op::kNum;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Op;

NodePtr make_leaf(Op op, double value = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

struct FuncName {
  std::string_view name;
  Op op;
};
constexpr FuncName kFunctions[] = {
    {"ln", Op::kLn},     {"exp", Op::kExp},   {"abs", Op::kAbs},
    {"sign", Op::kSign}, {"sqrt", Op::kSqrt},
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ == src_.size()) fail("expression");
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(std::string expected) const {
    throw SyntaxError(Errc::kSyntaxError, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_node(Op::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_node(Op::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Op::kNeg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Op::kPow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ == src_.size()) fail("expression");
    const char c = src_[pos_];
    if (accept('(')) {
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("expression");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    const auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail("digit");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("exponent digits");
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("number");
    }
    return make_leaf(Op::kNum, value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x") return make_leaf(Op::kVarX);
    if (name == "t") return make_leaf(Op::kVarT);
    for (const auto& fn : kFunctions) {
      if (fn.name == name) {
        expect('(');
        NodePtr arg = parse_expr();
        expect(')');
        return make_node(fn.op, arg);
      }
    }
    throw SyntaxError(Errc::kUnknownIdentifier, start,
                      "x, t, ln, exp, abs, sign or sqrt (got '" +
                          std::string(name) + "')");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

int precedence(const Expr::Node& n) {
  switch (n.op) {
    case Op::kAdd:
    case Op::kSub: return 1;
    case Op::kMul:
    case Op::kDiv: return 2;
    case Op::kNeg: return 3;
    case Op::kPow: return 4;
    default: return 5;
  }
}

std::string_view func_name(Op op) {
  for (const auto& fn : kFunctions) {
    if (fn.op == op) return fn.name;
  }
  return "?";
}

std::string print(const Expr::Node& n) {
  const auto wrap = [](const Expr::Node& child, bool parens) {
    return parens ? "(" + print(child) + ")" : print(child);
  };
  const int p = precedence(n);
  switch (n.op) {
    case Op::kNum: return shortest_repr(n.value);
    case Op::kVarX: return "x";
    case Op::kVarT: return "t";
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv: {
      const char* sym = n.op == Op::kAdd   ? " + "
                        : n.op == Op::kSub ? " - "
                        : n.op == Op::kMul ? " * "
                                           : " / ";
      return wrap(*n.lhs, precedence(*n.lhs) < p) + sym +
             wrap(*n.rhs, precedence(*n.rhs) <= p);
    }
    case Op::kPow:
      return wrap(*n.lhs, precedence(*n.lhs) <= p) + "^" +
             wrap(*n.rhs, precedence(*n.rhs) < 3);
    case Op::kNeg: return "-" + wrap(*n.lhs, precedence(*n.lhs) < 3);
    default: return std::string(func_name(n.op)) + "(" + print(*n.lhs) + ")";
  }
}

std::string sexpr(const Expr::Node& n) {
  switch (n.op) {
    case Op::kNum: return shortest_repr(n.value);
    case Op::kVarX: return "Var x";
    case Op::kVarT: return "Var t";
    case Op::kAdd: return "Add(" + sexpr(*n.lhs) + ", " + sexpr(*n.rhs) + ")";
    case Op::kSub: return "Sub(" + sexpr(*n.lhs) + ", " + sexpr(*n.rhs) + ")";
    case Op::kMul: return "Mul(" + sexpr(*n.lhs) + ", " + sexpr(*n.rhs) + ")";
    case Op::kDiv: return "Div(" + sexpr(*n.lhs) + ", " + sexpr(*n.rhs) + ")";
    case Op::kPow: return "Pow(" + sexpr(*n.lhs) + ", " + sexpr(*n.rhs) + ")";
    case Op::kNeg: return "Neg(" + sexpr(*n.lhs) + ")";
    case Op::kLn: return "Ln(" + sexpr(*n.lhs) + ")";
    case Op::kExp: return "Exp(" + sexpr(*n.lhs) + ")";
    case Op::kAbs: return "Abs(" + sexpr(*n.lhs) + ")";
    case Op::kSign: return "Sign(" + sexpr(*n.lhs) + ")";
    case Op::kSqrt: return "Sqrt(" + sexpr(*n.lhs) + ")";
  }
  return "?";
}

[[noreturn]] void domain_fail(const Expr::Node& n, const std::string& why) {
  throw Error(Errc::kDomainError, why + " in '" + print(n) + "'");
}

double evaluate(const Expr::Node& n, double x, double t) {
  switch (n.op) {
    case Op::kNum: return n.value;
    case Op::kVarX: return x;
    case Op::kVarT: return t;
    case Op::kAdd: return evaluate(*n.lhs, x, t) + evaluate(*n.rhs, x, t);
    case Op::kSub: return evaluate(*n.lhs, x, t) - evaluate(*n.rhs, x, t);
    case Op::kMul: return evaluate(*n.lhs, x, t) * evaluate(*n.rhs, x, t);
    case Op::kDiv: {
      const double num = evaluate(*n.lhs, x, t);
      const double den = evaluate(*n.rhs, x, t);
      if (den == 0.0) domain_fail(n, "division by zero");
      return num / den;
    }
    case Op::kPow: {
      const double base = evaluate(*n.lhs, x, t);
      const double expo = evaluate(*n.rhs, x, t);
      const bool integral = std::isfinite(expo) && expo == std::trunc(expo);
      if (base < 0.0 && !integral) {
        domain_fail(n, "negative base with non-integer exponent");
      }
      if (base == 0.0 && expo < 0.0) domain_fail(n, "zero to a negative power");
      return std::pow(base, expo);
    }
    case Op::kNeg: return -evaluate(*n.lhs, x, t);
    case Op::kLn: {
      const double v = evaluate(*n.lhs, x, t);
      if (!(v > 0.0)) domain_fail(n, "logarithm of a non-positive value");
      return std::log(v);
    }
    case Op::kExp: return std::exp(evaluate(*n.lhs, x, t));
    case Op::kAbs: return std::abs(evaluate(*n.lhs, x, t));
    case Op::kSign: {
      const double v = evaluate(*n.lhs, x, t);
      if (std::isnan(v)) domain_fail(n, "sign of NaN");
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    case Op::kSqrt: {
      const double v = evaluate(*n.lhs, x, t);
      if (v < 0.0) domain_fail(n, "square root of a negative value");
      return std::sqrt(v);
    }
  }
  return std::nan("");
}

bool uses(const Expr::Node& n, Op var) {
  if (n.op == var) return true;
  return (n.lhs && uses(*n.lhs, var)) || (n.rhs && uses(*n.rhs, var));
}

}  // namespace

Expr Expr::parse(std::string_view source) {
  return Expr(Parser(source).parse_all());
}

double Expr::eval(double x, double t) const { return evaluate(*root_, x, t); }
std::string Expr::to_string() const { return print(*root_); }
std::string Expr::to_sexpr() const { return sexpr(*root_); }
bool Expr::uses_x() const { return uses(*root_, Op::kVarX); }
bool Expr::uses_t() const { return uses(*root_, Op::kVarT); }

RealFn function_of_t(Expr e) {
  return [e = std::move(e)](double t) { return e.eval(0.0, t); };
}

RealFn function_of_x(Expr e) {
  return [e = std::move(e)](double x) { return e.eval(x, 0.0); };
}

bool validate_monotone(const Expr& e, const OpenInterval& theta,
                       std::size_t grid, std::uint64_t seed) {
  if (grid < 3) throw Error(Errc::kInvalidArgument, "grid must be >= 3");
  const auto points = theta.interior_grid(grid);
  double prev = e.eval(0.0, points.front());
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double v = e.eval(0.0, points[i]);
    if (!(v > prev)) return false;
    prev = v;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double u1 = unit(rng);
    double u2 = unit(rng);
    if (u1 > u2) std::swap(u1, u2);
    const double s = theta.from_unit(u1);
    const double t = theta.from_unit(u2);
    if (!(s < t) || !theta.contains(s) || !theta.contains(t)) continue;
    if (!(e.eval(0.0, s) < e.eval(0.0, t))) return false;
  }
  return true;
}

}  // namespace psiest
