#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grwlab/jet.hpp"

namespace grwlab {

/// Small arithmetic expression language used for inline warping functions
/// and boundary/test data.
///
/// Grammar (usual precedence, `^` right-associative and binding tighter than
/// unary minus):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Functions: exp, log, sqrt, sin, cos, pow(a, b). Constants: pi, e.
/// Variables are declared at parse time; evaluation binds them positionally.
class Expression {
 public:
  /// Throws ParseError on malformed input or unknown identifiers.
  static Expression parse(std::string_view text,
                          std::vector<std::string> variables = {"t"});

  Jet evaluate(std::span<const Jet> values) const;
  Jet evaluate(const Jet& t) const { return evaluate(std::span<const Jet>(&t, 1)); }
  double evaluate_plain(std::span<const double> values) const;

  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }

 private:
  enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow,
                  kExp, kLog, kSqrt, kSin, kCos };
  struct Node {
    Op op;
    double value = 0.0;  // kConst
    int index = -1;      // kVar
    int lhs = -1;
    int rhs = -1;
  };

  friend class ExpressionParser;

  Jet eval_node(int id, std::span<const Jet> values) const;

  std::string text_;
  std::vector<std::string> variables_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace grwlab
