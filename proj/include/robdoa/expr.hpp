#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robdoa/errors.hpp"

namespace robdoa {

// Scalar math expressions over state variables x1..xn and input variables
// u1..um. Immutable after parse; evaluation is re-entrant, so one Expression
// may be evaluated from many threads at once.
//
// Grammar (loosest to tightest binding):
//   expression := term (('+' | '-') term)*
//   term       := unary (('*' | '/') unary)*
//   unary      := '-' unary | power
//   power      := primary ('^' unary)?          -- right-associative
//   primary    := number | variable | func '(' expression ')'
//                 | '(' expression ')'
// so "-x1^2" reads as -(x1^2) and "2^3^2" as 2^(3^2).
// Functions: sin cos exp log sqrt abs tanh.
class Expression {
 public:
  /// Parses `source` against declared dimensions. Throws ParseError with a
  /// 0-based byte position on malformed input, unknown identifiers, or
  /// variable indices outside 1..n / 1..m.
  static Expression parse(std::string_view source, int state_dim,
                          int input_dim);

  /// Evaluates at (x, u). Any sub-expression producing a non-finite value
  /// (log of non-positive, division by zero, negative base with fractional
  /// exponent, overflow, ...) throws EvalError instead of propagating NaN.
  double evaluate(std::span<const double> x, std::span<const double> u) const;

  /// Precedence-aware round-trippable rendering of the syntax tree.
  std::string to_string() const;

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  const std::string& source() const { return source_; }

 private:
  enum class Op : std::uint8_t {
    constant,
    var_x,
    var_u,
    neg,
    add,
    sub,
    mul,
    div,
    pow,
    fn_sin,
    fn_cos,
    fn_exp,
    fn_log,
    fn_sqrt,
    fn_abs,
    fn_tanh,
  };

  struct Node {
    Op op;
    double value = 0.0;  // constant
    int index = 0;       // 0-based variable index
    int lhs = -1;
    int rhs = -1;
  };

  Expression() = default;

  double eval_node(int node, std::span<const double> x,
                   std::span<const double> u) const;
  void print_node(int node, int parent_bind, std::string& out) const;

  friend class ExpressionParser;

  std::vector<Node> nodes_;
  int root_ = -1;
  int state_dim_ = 0;
  int input_dim_ = 0;
  std::string source_;
};

}  // namespace robdoa
