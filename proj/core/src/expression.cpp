#include "grwlab/expression.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

#include "grwlab/errors.hpp"

namespace grwlab {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, Expression& out) : text_(text), out_(out) {}

  int parse() {
    const int root = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + std::string(text_) + "': " + what +
                     " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  int add(Expression::Node node) {
    out_.nodes_.push_back(node);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int binary(Op op, int lhs, int rhs) { return add({op, 0.0, -1, lhs, rhs}); }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Op::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Op::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) return add({Op::kNeg, 0.0, -1, parse_unary(), -1});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (accept('^')) return binary(Op::kPow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      const int inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return add({Op::kConst, value});
  }

  int parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));

    if (accept('(')) {
      const int arg = parse_expr();
      if (name == "pow") {
        expect(',');
        const int exponent = parse_expr();
        expect(')');
        return binary(Op::kPow, arg, exponent);
      }
      expect(')');
      Op op;
      if (name == "exp") op = Op::kExp;
      else if (name == "log") op = Op::kLog;
      else if (name == "sqrt") op = Op::kSqrt;
      else if (name == "sin") op = Op::kSin;
      else if (name == "cos") op = Op::kCos;
      else fail("unknown function '" + name + "'");
      return add({op, 0.0, -1, arg, -1});
    }

    const auto& vars = out_.variables_;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i] == name) return add({Op::kVar, 0.0, static_cast<int>(i)});
    }
    if (name == "pi") return add({Op::kConst, std::numbers::pi});
    if (name == "e") return add({Op::kConst, std::numbers::e});
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Expression expr;
  expr.text_ = std::string(text);
  expr.variables_ = std::move(variables);
  ExpressionParser parser(expr.text_, expr);
  expr.root_ = parser.parse();
  return expr;
}

Jet Expression::evaluate(std::span<const Jet> values) const {
  if (values.size() != variables_.size()) {
    throw ParameterError("expression '" + text_ + "' expects " +
                         std::to_string(variables_.size()) + " variable(s)");
  }
  return eval_node(root_, values);
}

double Expression::evaluate_plain(std::span<const double> values) const {
  std::vector<Jet> jets(values.begin(), values.end());
  return evaluate(jets).v;
}

Jet Expression::eval_node(int id, std::span<const Jet> values) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  switch (node.op) {
    case Op::kConst: return Jet(node.value);
    case Op::kVar: return values[static_cast<std::size_t>(node.index)];
    case Op::kAdd: return eval_node(node.lhs, values) + eval_node(node.rhs, values);
    case Op::kSub: return eval_node(node.lhs, values) - eval_node(node.rhs, values);
    case Op::kMul: return eval_node(node.lhs, values) * eval_node(node.rhs, values);
    case Op::kDiv: return eval_node(node.lhs, values) / eval_node(node.rhs, values);
    case Op::kNeg: return -eval_node(node.lhs, values);
    case Op::kPow: return pow(eval_node(node.lhs, values), eval_node(node.rhs, values));
    case Op::kExp: return exp(eval_node(node.lhs, values));
    case Op::kLog: return log(eval_node(node.lhs, values));
    case Op::kSqrt: return sqrt(eval_node(node.lhs, values));
    case Op::kSin: return sin(eval_node(node.lhs, values));
    case Op::kCos: return cos(eval_node(node.lhs, values));
  }
  return Jet();
}

}  // namespace grwlab
