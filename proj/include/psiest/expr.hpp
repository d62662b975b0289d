#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "psiest/kernel.hpp"

namespace psiest {

// Grammar (whitespace-insensitive):
//
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'x' | 't' | func '(' expr ')' | '(' expr ')'
//   func    := 'ln' | 'exp' | 'abs' | 'sign' | 'sqrt'
//   number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
class Expr {
 public:
  enum class Op {
    kNum, kVarX, kVarT,
    kAdd, kSub, kMul, kDiv, kPow,
    kNeg, kLn, kExp, kAbs, kSign, kSqrt,
  };

  /// Throws SyntaxError (kSyntaxError or kUnknownIdentifier) with a byte
  /// offset into source.
  static Expr parse(std::string_view source);

  /// IEEE evaluation; mathematically undefined operations throw
  /// Error(kDomainError) naming the offending subexpression.
  double eval(double x, double t) const;

  /// Canonical infix text with minimal parentheses.
  std::string to_string() const;
  /// Structural form, e.g. Sub(Pow(Var x, 2), Mul(3, Var t)).
  std::string to_sexpr() const;

  bool uses_x() const;
  bool uses_t() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

/// t -> e(0, t); for functions of the parameter.
RealFn function_of_t(Expr e);
/// x -> e(x, 0); for functions of the observation.
RealFn function_of_x(Expr e);

/// Strict increase on an interior grid of theta plus 100 seeded random pairs.
bool validate_monotone(const Expr& e, const OpenInterval& theta,
                       std::size_t grid, std::uint64_t seed = 0x5eedULL);

}  // namespace psiest
