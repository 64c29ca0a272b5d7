#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "potmap/errors.hpp"
#include "potmap/tensor.hpp"

namespace potmap::cli {

enum class VarKind { T, X };

struct Variable {
  VarKind kind = VarKind::X;
  int index = 0;  // zero-based
  bool operator==(const Variable&) const = default;
  bool operator<(const Variable& o) const {
    return kind != o.kind ? kind < o.kind : index < o.index;
  }
};

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  Variable var;
  Func func = Func::Sin;
  NodePtr a;
  NodePtr b;
};

/// Immutable expression tree over t1..tp, x1..xn.
class Expression {
 public:
  Expression();
  explicit Expression(NodePtr root);

  static Expression number(double v);
  static Expression variable(Variable v);

  double evaluate(const Vector& t, const Vector& x) const;
  /// Fully parenthesized text; literals at 17 significant digits.
  std::string print() const;
  /// Exact partial derivative with light constant folding.
  Expression derivative(Variable v) const;
  bool depends_on(Variable v) const;
  std::vector<Variable> variables() const;
  bool is_constant() const;

  const NodePtr& root() const noexcept { return root_; }
  bool operator==(const Expression& o) const;

 private:
  NodePtr root_;
};

/// Failure with a position and the set of tokens that would have been accepted.
class ParseFailure : public Error {
 public:
  ParseFailure(int line, int column, std::vector<std::string> expected, const std::string& found);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Limits on variable indices (1-based names t1..tp, x1..xn); nullopt accepts any.
struct VariableLimits {
  std::optional<int> p;
  std::optional<int> n;
};

/// Precedence: ^ (right associative) > unary minus > * / > + -.
Expression parse_expression(std::string_view src, VariableLimits limits = {});

}  // namespace potmap::cli
