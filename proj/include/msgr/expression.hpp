#pragma once

// Arithmetic expressions over x0..x3, named parameters and the constant pi.
//
// Grammar, loosest binding first:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?          right associative
//   exponent:= '-' exponent | power               must fold to an integer constant
//   primary := number | name | func '(' expr ')' | '(' expr ')'
// Functions: sin cos exp sqrt ln.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msgr/errors.hpp"
#include "msgr/dual.hpp"
#include "msgr/taylor.hpp"

namespace msgr {

enum class NodeKind { Number, Variable, Parameter, Pi, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Sqrt, Ln };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;  // Number
  int index = 0;        // Variable: coordinate; Pow: exponent
  Function function = Function::Sin;
  std::string name;  // Parameter
  ExprPtr lhs;       // unary operand, left operand, Pow base, Call argument
  ExprPtr rhs;

  friend bool operator==(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    auto same = [](const ExprPtr& x, const ExprPtr& y) { return (!x && !y) || (x && y && *x == *y); };
    switch (a.kind) {
      case NodeKind::Number: return a.number == b.number;
      case NodeKind::Variable: return a.index == b.index;
      case NodeKind::Parameter: return a.name == b.name;
      case NodeKind::Pi: return true;
      case NodeKind::Pow: return a.index == b.index && same(a.lhs, b.lhs);
      case NodeKind::Call: return a.function == b.function && same(a.lhs, b.lhs);
      default: return same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
    }
  }
};

inline const char* function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Sqrt: return "sqrt";
    case Function::Ln: return "ln";
  }
  return "?";
}

class Expression {
 public:
  Expression() : root_(std::make_shared<const ExprNode>()) {}
  explicit Expression(ExprPtr root) : root_(std::move(root)) {}

  static Expression constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->number = v;
    return Expression(std::move(n));
  }

  const ExprNode& root() const { return *root_; }

  friend bool operator==(const Expression& a, const Expression& b) { return *a.root_ == *b.root_; }

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const { return print(*root_); }

  bool is_zero_constant() const { return root_->kind == NodeKind::Number && root_->number == 0.0; }

  /// Parameter names the expression refers to.
  std::set<std::string> parameters() const {
    std::set<std::string> out;
    collect(*root_, out);
    return out;
  }

  template <class T>
  T evaluate(const std::array<T, 4>& x, const std::map<std::string, double>& params) const {
    return eval(*root_, x, params);
  }

 private:
  static std::string print(const ExprNode& n) {
    switch (n.kind) {
      case NodeKind::Number: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.number);
        return buf;
      }
      case NodeKind::Variable: return "x" + std::to_string(n.index);
      case NodeKind::Parameter: return n.name;
      case NodeKind::Pi: return "pi";
      case NodeKind::Negate: return "(-" + print(*n.lhs) + ")";
      case NodeKind::Add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
      case NodeKind::Sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
      case NodeKind::Mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
      case NodeKind::Div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
      case NodeKind::Pow: return "(" + print(*n.lhs) + " ^ " + std::to_string(n.index) + ")";
      case NodeKind::Call: return std::string(function_name(n.function)) + "(" + print(*n.lhs) + ")";
    }
    return {};
  }

  static void collect(const ExprNode& n, std::set<std::string>& out) {
    if (n.kind == NodeKind::Parameter) out.insert(n.name);
    if (n.lhs) collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
  }

  static double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw SingularPointError(std::string("expression is singular here: ") + what);
    return v;
  }

  static double eval_call(Function f, double a) {
    switch (f) {
      case Function::Sin: return std::sin(a);
      case Function::Cos: return std::cos(a);
      case Function::Exp: return checked(std::exp(a), "exp overflow");
      case Function::Sqrt:
        if (!(a > 0.0)) throw SingularPointError("sqrt of a nonpositive value");
        return std::sqrt(a);
      case Function::Ln:
        if (!(a > 0.0)) throw SingularPointError("ln of a nonpositive value");
        return std::log(a);
    }
    return 0.0;
  }

  static JetScalar eval_call(Function f, const JetScalar& a) {
    switch (f) {
      case Function::Sin: return sin(a);
      case Function::Cos: return cos(a);
      case Function::Exp: return exp(a);
      case Function::Sqrt: return sqrt(a);
      case Function::Ln: return log(a);
    }
    return a;
  }

  static double int_pow(double b, int n) {
    if (n < 0) {
      if (b == 0.0) throw SingularPointError("zero raised to a negative power");
      return 1.0 / int_pow(b, -n);
    }
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= b;
    return r;
  }
  static JetScalar int_pow(const JetScalar& b, int n) { return pow(b, n); }

  static double divide(double a, double b) {
    if (b == 0.0) throw SingularPointError("division by zero");
    return a / b;
  }
  static JetScalar divide(const JetScalar& a, const JetScalar& b) { return a / b; }

  template <class T>
  static T eval(const ExprNode& n, const std::array<T, 4>& x, const std::map<std::string, double>& params) {
    const T& ref = x[0];
    switch (n.kind) {
      case NodeKind::Number: return zero_like(ref) + n.number;
      case NodeKind::Variable: return x[static_cast<std::size_t>(n.index)];
      case NodeKind::Parameter: {
        const auto it = params.find(n.name);
        if (it == params.end()) throw ConfigError("parameter '" + n.name + "' has no value");
        return zero_like(ref) + it->second;
      }
      case NodeKind::Pi: return zero_like(ref) + M_PI;
      case NodeKind::Negate: return -eval(*n.lhs, x, params);
      case NodeKind::Add: return eval(*n.lhs, x, params) + eval(*n.rhs, x, params);
      case NodeKind::Sub: return eval(*n.lhs, x, params) - eval(*n.rhs, x, params);
      case NodeKind::Mul: return eval(*n.lhs, x, params) * eval(*n.rhs, x, params);
      case NodeKind::Div: return divide(eval(*n.lhs, x, params), eval(*n.rhs, x, params));
      case NodeKind::Pow: return int_pow(eval(*n.lhs, x, params), n.index);
      case NodeKind::Call: return eval_call(n.function, eval(*n.lhs, x, params));
    }
    return zero_like(ref);
  }

  ExprPtr root_;
};

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const std::set<std::string>& params) : s_(text), params_(params) {}

  Expression parse() {
    ExprPtr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return Expression(std::move(e));
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static ExprPtr binary(NodeKind k, ExprPtr a, ExprPtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (accept('+')) {
        e = binary(NodeKind::Add, e, term());
      } else if (accept('-')) {
        e = binary(NodeKind::Sub, e, term());
      } else {
        return e;
      }
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      if (accept('*')) {
        e = binary(NodeKind::Mul, e, unary());
      } else if (accept('/')) {
        e = binary(NodeKind::Div, e, unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr unary() {
    if (accept('-')) return binary(NodeKind::Negate, unary(), nullptr);
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    skip();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    const double e = exponent(at + 1);
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Pow;
    n->index = static_cast<int>(e);
    n->lhs = std::move(base);
    return n;
  }

  /// Parses an exponent and folds it to an integer constant.
  double exponent(std::size_t at) {
    skip();
    const std::size_t start = pos_;
    if (accept('-')) return -exponent(start);
    ExprPtr e = power();
    double v = 0.0;
    if (!fold(*e, v)) fail_at("exponent must be an integer constant", start);
    if (v != std::floor(v) || std::abs(v) > 64) fail_at("non-integer exponent", at);
    return v;
  }

  static bool fold(const ExprNode& n, double& v) {
    switch (n.kind) {
      case NodeKind::Number: v = n.number; return true;
      case NodeKind::Negate:
        if (!fold(*n.lhs, v)) return false;
        v = -v;
        return true;
      case NodeKind::Pow: {
        double b = 0.0;
        if (!fold(*n.lhs, b)) return false;
        v = std::pow(b, n.index);
        return true;
      }
      default: return false;
    }
  }

  ExprPtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_shared<ExprNode>();
    n->number = v;
    return n;
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    auto n = std::make_shared<ExprNode>();

    static const std::map<std::string, Function> functions{
        {"sin", Function::Sin}, {"cos", Function::Cos}, {"exp", Function::Exp}, {"sqrt", Function::Sqrt}, {"ln", Function::Ln}};
    if (const auto f = functions.find(id); f != functions.end()) {
      if (!accept('(')) fail("expected '(' after function " + id);
      n->kind = NodeKind::Call;
      n->function = f->second;
      n->lhs = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (id.size() == 2 && id[0] == 'x' && id[1] >= '0' && id[1] <= '3') {
      n->kind = NodeKind::Variable;
      n->index = id[1] - '0';
      return n;
    }
    if (params_.count(id) != 0) {
      n->kind = NodeKind::Parameter;
      n->name = id;
      return n;
    }
    if (id == "pi") {
      n->kind = NodeKind::Pi;
      return n;
    }
    fail_at("unknown identifier '" + id + "'", start);
  }

  std::string_view s_;
  const std::set<std::string>& params_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse `text`; identifiers other than x0..x3, pi and the function names
/// must appear in `params`.
inline Expression parse_expression(std::string_view text, const std::set<std::string>& params = {}) {
  return detail::ExpressionParser(text, params).parse();
}

}  // namespace msgr
