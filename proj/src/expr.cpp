#include "taut/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <system_error>

namespace taut {

SyntaxError::SyntaxError(std::size_t offset, std::string expected, const std::string& detail)
    : Error("syntax error at offset " + std::to_string(offset) + ": " + detail),
      offset_(offset),
      expected_(std::move(expected)) {}

struct Expr::Node {
  ExprKind kind = ExprKind::Number;
  double value = 0.0;
  NamedConstant constant = NamedConstant::Pi;
  Function function = Function::Sin;
  std::string name;
  // Optional so that building a node never default-constructs child nodes.
  std::optional<Expr> a;
  std::optional<Expr> b;
};

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 5> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"exp", Function::Exp},
    {"ln", Function::Ln},
    {"sqrt", Function::Sqrt},
}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

std::optional<NamedConstant> lookup_constant(std::string_view name) {
  if (name == "pi") return NamedConstant::Pi;
  if (name == "e") return NamedConstant::E;
  return std::nullopt;
}

}  // namespace

Expr::Expr() : Expr(number(0.0)) {}

Expr Expr::number(double value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Number;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::constant(NamedConstant c) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->constant = c;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Negate;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(ExprKind op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::call(Function f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Call;
  n->function = f;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::number_value() const { return node_->value; }
NamedConstant Expr::named_constant() const { return node_->constant; }
const std::string& Expr::variable_name() const { return node_->name; }
Function Expr::function() const { return node_->function; }
const Expr& Expr::lhs() const { return *node_->a; }
const Expr& Expr::rhs() const { return *node_->b; }

// Folding helpers used by differentiate and the arithmetic operators.

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  return Expr::binary(ExprKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return -b;
  return Expr::binary(ExprKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_number(0.0) || b.is_number(0.0)) return Expr::number(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  return Expr::binary(ExprKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_number(0.0)) return Expr::number(0.0);
  if (b.is_number(1.0)) return a;
  return Expr::binary(ExprKind::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_number(0.0)) return a;
  if (a.kind() == ExprKind::Negate) return a.lhs();
  return Expr::negate(a);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok type;
  std::size_t offset;
  std::string_view text;
  double value = 0.0;
};

std::string describe(const Token& t) {
  if (t.type == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, {}};
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number(start);
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, start, src_.substr(start, pos_ - start)};
    }
    ++pos_;
    const auto text = src_.substr(start, 1);
    switch (c) {
      case '+': return {Tok::Plus, start, text};
      case '-': return {Tok::Minus, start, text};
      case '*': return {Tok::Star, start, text};
      case '/': return {Tok::Slash, start, text};
      case '^': return {Tok::Caret, start, text};
      case '(': return {Tok::LParen, start, text};
      case ')': return {Tok::RParen, start, text};
      default:
        throw SyntaxError(start, "expression", "unexpected character '" + std::string(text) + "'");
    }
  }

 private:
  bool digit_at(std::size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  Token number(std::size_t start) {
    while (digit_at(pos_)) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      if (!digit_at(pos_ + 1)) throw SyntaxError(pos_ + 1, "digit", "expected digit after '.'");
      ++pos_;
      while (digit_at(pos_)) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      // A bare 'e' after digits is not an exponent; the parser will reject it.
      if (digit_at(p)) {
        pos_ = p;
        while (digit_at(pos_)) ++pos_;
      }
    }
    const auto text = src_.substr(start, pos_ - start);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || !std::isfinite(v))
      throw SyntaxError(start, "finite number", "numeric literal out of range");
    return {Tok::Number, start, text, v};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { advance(); }

  Expr parse_all() {
    Expr e = expr();
    if (cur_.type != Tok::End) fail("operator or end of input");
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(cur_.offset, expected, "expected " + expected + ", found " + describe(cur_));
  }

  void expect(Tok t, const std::string& what) {
    if (cur_.type != t) fail(what);
    advance();
  }

  Expr expr() {
    Expr e = term();
    while (cur_.type == Tok::Plus || cur_.type == Tok::Minus) {
      const auto op = cur_.type == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
      advance();
      e = Expr::binary(op, std::move(e), term());
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (cur_.type == Tok::Star || cur_.type == Tok::Slash) {
      const auto op = cur_.type == Tok::Star ? ExprKind::Mul : ExprKind::Div;
      advance();
      e = Expr::binary(op, std::move(e), factor());
    }
    return e;
  }

  Expr factor() {
    if (cur_.type == Tok::Minus) {
      advance();
      return Expr::negate(power());
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (cur_.type == Tok::Caret) {
      advance();
      return Expr::binary(ExprKind::Pow, std::move(base), factor());
    }
    return base;
  }

  Expr atom() {
    switch (cur_.type) {
      case Tok::Number: {
        const double v = cur_.value;
        advance();
        return Expr::number(v);
      }
      case Tok::LParen: {
        advance();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        const Token id = cur_;
        advance();
        if (cur_.type == Tok::LParen) {
          const auto f = lookup_function(id.text);
          if (!f) {
            throw SyntaxError(id.offset, "function name",
                              "unknown function '" + std::string(id.text) + "'");
          }
          advance();
          Expr arg = expr();
          expect(Tok::RParen, "')'");
          return Expr::call(*f, std::move(arg));
        }
        if (lookup_function(id.text)) {
          throw SyntaxError(cur_.offset, "'('",
                            "function '" + std::string(id.text) + "' requires an argument");
        }
        if (const auto c = lookup_constant(id.text)) return Expr::constant(*c);
        return Expr::variable(std::string(id.text));
      }
      default:
        fail("number, identifier or '('");
    }
  }

  Lexer lex_;
  Token cur_{Tok::End, 0, {}};
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

// Binding strength of the grammar level a node prints at.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Negate: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
  }
}

void print_to(const Expr& e, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print_to(e, out);
    out += ')';
  } else {
    print_to(e, out);
  }
}

void print_to(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number: {
      const double v = e.number_value();
      if (v < 0.0 || std::signbit(v)) {
        // Literals are unsigned in the grammar.
        out += "(-";
        print_to(Expr::number(-v), out);
        out += ')';
        return;
      }
      std::array<char, 64> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      std::string s(buf.data(), res.ptr);
      // to_chars may emit "1e+20" or "5e-07"; both are valid literals.
      out += s;
      return;
    }
    case ExprKind::Constant:
      out += e.named_constant() == NamedConstant::Pi ? "pi" : "e";
      return;
    case ExprKind::Variable: out += e.variable_name(); return;
    case ExprKind::Negate:
      out += '-';
      print_child(e.lhs(), 4, out);
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
      const int p = precedence(e);
      print_child(e.lhs(), p, out);
      switch (e.kind()) {
        case ExprKind::Add: out += " + "; break;
        case ExprKind::Sub: out += " - "; break;
        case ExprKind::Mul: out += "*"; break;
        default: out += "/"; break;
      }
      // Right operand: a term for +/-, a factor for * and /.
      print_child(e.rhs(), p + 1, out);
      return;
    }
    case ExprKind::Pow:
      print_child(e.lhs(), 5, out);
      out += '^';
      print_child(e.rhs(), 3, out);
      return;
    case ExprKind::Call:
      out += function_name(e.function());
      out += '(';
      print_to(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_error(const Expr& node, const std::string& what) {
  throw DomainError(what + " in '" + print(node) + "'");
}

}  // namespace

double eval(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case ExprKind::Number: return e.number_value();
    case ExprKind::Constant:
      return e.named_constant() == NamedConstant::Pi ? std::numbers::pi : std::numbers::e;
    case ExprKind::Variable: {
      const auto it = env.find(e.variable_name());
      if (it == env.end()) throw BindError("unbound variable '" + e.variable_name() + "'");
      return it->second;
    }
    case ExprKind::Negate: return -eval(e.lhs(), env);
    case ExprKind::Add: return eval(e.lhs(), env) + eval(e.rhs(), env);
    case ExprKind::Sub: return eval(e.lhs(), env) - eval(e.rhs(), env);
    case ExprKind::Mul: return eval(e.lhs(), env) * eval(e.rhs(), env);
    case ExprKind::Div: {
      const double num = eval(e.lhs(), env);
      const double den = eval(e.rhs(), env);
      if (den == 0.0) domain_error(e, "division by zero");
      return num / den;
    }
    case ExprKind::Pow: {
      const double base = eval(e.lhs(), env);
      const double ex = eval(e.rhs(), env);
      if (base == 0.0 && ex < 0.0) domain_error(e, "zero raised to a negative power");
      const double r = std::pow(base, ex);
      if (std::isnan(r)) domain_error(e, "negative base with non-integer exponent");
      return r;
    }
    case ExprKind::Call: {
      const double x = eval(e.lhs(), env);
      switch (e.function()) {
        case Function::Sin: return std::sin(x);
        case Function::Cos: return std::cos(x);
        case Function::Exp: return std::exp(x);
        case Function::Ln:
          if (x <= 0.0) domain_error(e, "logarithm of non-positive value");
          return std::log(x);
        case Function::Sqrt:
          if (x < 0.0) domain_error(e, "square root of negative value");
          return std::sqrt(x);
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Differentiation

bool depends_on(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Constant: return false;
    case ExprKind::Variable: return e.variable_name() == var;
    case ExprKind::Negate:
    case ExprKind::Call: return depends_on(e.lhs(), var);
    default: return depends_on(e.lhs(), var) || depends_on(e.rhs(), var);
  }
}

Expr differentiate(const Expr& e, std::string_view var) {
  if (!depends_on(e, var)) return Expr::number(0.0);
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Constant: return Expr::number(0.0);
    case ExprKind::Variable: return Expr::number(1.0);
    case ExprKind::Negate: return -differentiate(e.lhs(), var);
    case ExprKind::Add: return differentiate(e.lhs(), var) + differentiate(e.rhs(), var);
    case ExprKind::Sub: return differentiate(e.lhs(), var) - differentiate(e.rhs(), var);
    case ExprKind::Mul: {
      const Expr& u = e.lhs();
      const Expr& v = e.rhs();
      return differentiate(u, var) * v + u * differentiate(v, var);
    }
    case ExprKind::Div: {
      const Expr& u = e.lhs();
      const Expr& v = e.rhs();
      const Expr du = differentiate(u, var);
      const Expr dv = differentiate(v, var);
      if (dv.is_number(0.0)) return du / v;
      return (du * v - u * dv) / Expr::binary(ExprKind::Pow, v, Expr::number(2.0));
    }
    case ExprKind::Pow: {
      const Expr& base = e.lhs();
      const Expr& ex = e.rhs();
      if (depends_on(ex, var)) {
        throw UnsupportedDerivative("cannot differentiate '" + print(e) + "' with respect to " +
                                    std::string(var) + ": exponent depends on the variable");
      }
      const Expr reduced = ex.kind() == ExprKind::Number ? Expr::number(ex.number_value() - 1.0)
                                                         : ex - Expr::number(1.0);
      return ex * Expr::binary(ExprKind::Pow, base, reduced) * differentiate(base, var);
    }
    case ExprKind::Call: {
      const Expr& u = e.lhs();
      const Expr du = differentiate(u, var);
      switch (e.function()) {
        case Function::Sin: return Expr::call(Function::Cos, u) * du;
        case Function::Cos: return -(Expr::call(Function::Sin, u) * du);
        case Function::Exp: return e * du;
        case Function::Ln: return du / u;
        case Function::Sqrt: return du / (Expr::number(2.0) * e);
      }
    }
  }
  return Expr::number(0.0);
}

Expr substitute(const Expr& e, std::string_view var, const Expr& replacement) {
  if (!depends_on(e, var)) return e;
  switch (e.kind()) {
    case ExprKind::Variable: return replacement;
    case ExprKind::Negate: return Expr::negate(substitute(e.lhs(), var, replacement));
    case ExprKind::Call: return Expr::call(e.function(), substitute(e.lhs(), var, replacement));
    case ExprKind::Number:
    case ExprKind::Constant: return e;
    default:
      return Expr::binary(e.kind(), substitute(e.lhs(), var, replacement),
                          substitute(e.rhs(), var, replacement));
  }
}

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Constant: return;
    case ExprKind::Variable: out.insert(e.variable_name()); return;
    case ExprKind::Negate:
    case ExprKind::Call: collect(e.lhs(), out); return;
    default:
      collect(e.lhs(), out);
      collect(e.rhs(), out);
  }
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

std::string_view function_name(Function f) {
  for (const auto& [n, fn] : kFunctions)
    if (fn == f) return n;
  return "?";
}

std::string coordinate_name(std::size_t index) { return "x" + std::to_string(index + 1); }

bool is_reserved_identifier(std::string_view name) {
  return lookup_constant(name).has_value() || lookup_function(name).has_value();
}

}  // namespace taut
