#pragma once

// Scalar expression language used for chart frames and vector-field
// coefficients: parsing, printing, evaluation and exact partial derivatives.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "taut/error.hpp"

namespace taut {

/// Variable bindings for evaluation. Coordinates are named x1..xn.
using Env = std::map<std::string, double, std::less<>>;

enum class ExprKind { Number, Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Ln, Sqrt };
enum class NamedConstant { Pi, E };

/// Immutable expression tree. Copies share nodes; safe to use from many threads.
class Expr {
 public:
  struct Node;

  /// The literal 0.
  Expr();

  static Expr number(double value);
  static Expr constant(NamedConstant c);
  static Expr variable(std::string name);
  static Expr negate(Expr operand);
  static Expr binary(ExprKind op, Expr lhs, Expr rhs);
  static Expr call(Function f, Expr arg);

  ExprKind kind() const;
  double number_value() const;
  NamedConstant named_constant() const;
  const std::string& variable_name() const;
  Function function() const;
  /// Operand of Negate/Call, left operand of binary nodes.
  const Expr& lhs() const;
  const Expr& rhs() const;

  bool is_number(double v) const { return kind() == ExprKind::Number && number_value() == v; }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Parses `text`. Throws SyntaxError (with byte offset) on malformed input or
/// unknown function names.
Expr parse(std::string_view text);

/// Prints `e` in the input grammar; parse(print(e)) evaluates like `e`.
/// Negative literals print as "(-v)" and reparse as a negation.
std::string print(const Expr& e);

double eval(const Expr& e, const Env& env);

/// Symbolic partial derivative. Light constant folding only, no simplifier.
/// Throws UnsupportedDerivative for a^b when b mentions `var`.
Expr differentiate(const Expr& e, std::string_view var);

/// Replaces every reference to `var` by `replacement`.
Expr substitute(const Expr& e, std::string_view var, const Expr& replacement);

std::set<std::string> free_variables(const Expr& e);
bool depends_on(const Expr& e, std::string_view var);

std::string_view function_name(Function f);

/// "x1", "x2", ...; `index` is zero-based.
std::string coordinate_name(std::size_t index);

/// True for pi, e and the function names.
bool is_reserved_identifier(std::string_view name);

}  // namespace taut
