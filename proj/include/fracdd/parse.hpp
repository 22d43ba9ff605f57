#pragma once

/*
 * Infix formula parser.
 *
 * parse_formula builds a small AST usable as a numeric callable; to_expr
 * converts it into a normalized Expr when it lies in the closed-form classes.
 * Identifiers that are not reserved names are variables. The name "y" is the
 * dependent variable of an FDE right-hand side; any other free name is the
 * independent variable.
 */

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fracdd/expr.hpp"

namespace fracdd {

struct Node {
  enum class Op { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
  Op op = Op::Number;
  Complex value{};
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
  std::size_t column = 1;
};

using NodePtr = std::shared_ptr<const Node>;

namespace detail {

inline const std::set<std::string>& function_names() {
  static const std::set<std::string> names = {
      "exp", "sin",   "cos",  "sinh", "cosh", "ln", "log",   "sqrt",  "H",
      "bose", "zero", "delta", "Li",  "lnm",  "kummer", "gamma", "abs"};
  return names;
}

inline bool is_constant_name(const std::string& s) { return s == "pi" || s == "e" || s == "i"; }

class Parser {
 public:
  explicit Parser(std::string text) : s_(std::move(text)) {}

  NodePtr parse() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("empty expression", 1);
    NodePtr n = expr();
    skip();
    if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_ + 1);
    return n;
  }

 private:
  std::string s_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  static NodePtr make(Node::Op op, std::vector<NodePtr> args, std::size_t col) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->column = col;
    return n;
  }
  bool starts_operand() {
    const char c = peek();
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '(' ||
           c == '-' || c == '+';
  }
  void require_operand(std::size_t op_col, char op) {
    if (!starts_operand())
      throw ParseError(std::string("missing operand after '") + op + "'", op_col);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      const std::size_t col = pos_ + 1;
      ++pos_;
      require_operand(col, c);
      lhs = make(c == '+' ? Node::Op::Add : Node::Op::Sub, {lhs, term()}, col);
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      const std::size_t col = pos_ + 1;
      ++pos_;
      require_operand(col, c);
      lhs = make(c == '*' ? Node::Op::Mul : Node::Op::Div, {lhs, unary()}, col);
    }
  }

  NodePtr unary() {
    const char c = peek();
    if (c == '-' || c == '+') {
      const std::size_t col = pos_ + 1;
      ++pos_;
      require_operand(col, c);
      NodePtr inner = unary();
      return c == '-' ? make(Node::Op::Neg, {inner}, col) : inner;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek() == '^') {
      const std::size_t col = pos_ + 1;
      ++pos_;
      require_operand(col, '^');
      return make(Node::Op::Pow, {base, unary()}, col);
    }
    return base;
  }

  NodePtr primary() {
    const char c = peek();
    const std::size_t col = pos_ + 1;
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (peek() != ')') throw ParseError("expected ')'", pos_ + 1);
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (function_names().count(name)) {
        if (peek() != '(') throw ParseError("expected '(' after " + name, pos_ + 1);
        ++pos_;
        std::vector<NodePtr> args;
        if (peek() != ')') {
          args.push_back(expr());
          while (peek() == ',') {
            ++pos_;
            args.push_back(expr());
          }
        }
        if (peek() != ')') throw ParseError("expected ')'", pos_ + 1);
        ++pos_;
        auto n = make(Node::Op::Call, std::move(args), col);
        std::const_pointer_cast<Node>(n)->name = name;
        return n;
      }
      auto n = make(Node::Op::Variable, {}, col);
      auto mut = std::const_pointer_cast<Node>(n);
      mut->name = name;
      if (name == "pi") {
        mut->op = Node::Op::Number;
        mut->value = kPi;
      } else if (name == "e") {
        mut->op = Node::Op::Number;
        mut->value = std::exp(1.0);
      } else if (name == "i") {
        mut->op = Node::Op::Number;
        mut->value = Complex(0.0, 1.0);
      }
      return n;
    }
    if (c == '\0') throw ParseError("unexpected end of input", col);
    throw ParseError(std::string("unexpected '") + c + "'", col);
  }

  NodePtr number() {
    const std::size_t col = pos_ + 1;
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", col);
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = make(Node::Op::Number, {}, col);
    auto mut = std::const_pointer_cast<Node>(n);
    // imaginary literal such as 2i (but not the start of an identifier)
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        (pos_ + 1 >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
      ++pos_;
      mut->value = Complex(0.0, v);
    } else {
      mut->value = v;
    }
    return n;
  }
};

inline void collect_variables(const Node& n, std::set<std::string>& out) {
  if (n.op == Node::Op::Variable) out.insert(n.name);
  for (const auto& a : n.args) collect_variables(*a, out);
}

}  // namespace detail

/// A parsed formula: evaluates numerically in the independent variable x
/// and, for FDE right-hand sides, the dependent variable y.
class Formula {
 public:
  Formula() = default;
  Formula(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {
    std::set<std::string> vars;
    detail::collect_variables(*root_, vars);
    for (const auto& v : vars) {
      if (v == "y")
        has_y_ = true;
      else
        independent_.push_back(v);
    }
    if (independent_.size() > 1)
      throw ParseError("more than one independent variable: " + independent_[0] + ", " + independent_[1],
                       1);
  }

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }
  /// Name of the independent variable ("" if the formula is constant in it).
  std::string variable() const { return independent_.empty() ? std::string() : independent_.front(); }
  bool uses_y() const { return has_y_; }

  Complex operator()(Complex x, Complex y = 0.0) const { return eval(*root_, x, y); }

 private:
  NodePtr root_;
  std::string source_;
  std::vector<std::string> independent_;
  bool has_y_ = false;

  Complex eval(const Node& n, Complex x, Complex y) const {
    using Op = Node::Op;
    switch (n.op) {
      case Op::Number:
        return n.value;
      case Op::Variable:
        return n.name == "y" ? y : x;
      case Op::Add:
        return eval(*n.args[0], x, y) + eval(*n.args[1], x, y);
      case Op::Sub:
        return eval(*n.args[0], x, y) - eval(*n.args[1], x, y);
      case Op::Mul:
        return eval(*n.args[0], x, y) * eval(*n.args[1], x, y);
      case Op::Div: {
        const Complex d = eval(*n.args[1], x, y);
        if (d == Complex{}) throw SingularError("division by zero");
        return eval(*n.args[0], x, y) / d;
      }
      case Op::Pow:
        return special::cpow(eval(*n.args[0], x, y), eval(*n.args[1], x, y));
      case Op::Neg:
        return -eval(*n.args[0], x, y);
      case Op::Call:
        return call(n, x, y);
    }
    return 0.0;
  }

  Complex arg(const Node& n, std::size_t i, Complex x, Complex y) const {
    return eval(*n.args[i], x, y);
  }

  void arity(const Node& n, std::size_t lo, std::size_t hi) const {
    if (n.args.size() < lo || n.args.size() > hi)
      throw ParseError("wrong number of arguments to " + n.name, n.column);
  }

  Complex call(const Node& n, Complex x, Complex y) const {
    const std::string& f = n.name;
    if (f == "zero" || f == "delta") {
      arity(n, 1, 2);
      const Complex order = arg(n, 0, x, y);
      const Complex w = n.args.size() == 2 ? arg(n, 1, x, y) : x;
      const Kernel k = f == "zero" ? Kernel(ZeroFn{order}) : Kernel(DeltaDeriv{order});
      return evaluate_at(normalize(Expr::of(k)), w);
    }
    if (f == "Li") {
      arity(n, 2, 2);
      return special::polylog(arg(n, 0, x, y), arg(n, 1, x, y));
    }
    if (f == "lnm") {
      arity(n, 3, 3);
      return evaluate_at(Expr::of(LogMonomial{arg(n, 0, x, y), arg(n, 1, x, y)}), arg(n, 2, x, y));
    }
    if (f == "kummer") {
      arity(n, 4, 4);
      return evaluate_at(Expr::of(KummerPair{arg(n, 0, x, y), arg(n, 1, x, y), arg(n, 2, x, y)}),
                         arg(n, 3, x, y));
    }
    arity(n, 1, 1);
    const Complex u = arg(n, 0, x, y);
    if (f == "exp") return std::exp(u);
    if (f == "sin") return std::sin(u);
    if (f == "cos") return std::cos(u);
    if (f == "sinh") return std::sinh(u);
    if (f == "cosh") return std::cosh(u);
    if (f == "sqrt") return special::cpow(u, 0.5);
    if (f == "abs") return std::abs(u);
    if (f == "gamma") return special::gamma(u);
    if (f == "ln" || f == "log") {
      if (u == Complex{}) throw SingularError("ln(0)");
      return special::log_principal(u);
    }
    if (f == "H") return u.real() > 0 ? 1.0 : (u.real() < 0 ? 0.0 : 0.5);
    if (f == "bose") {
      if (u == Complex{}) throw SingularError("bose(0)");
      if (u.imag() == 0.0) return 1.0 / std::expm1(-u.real());
      return 1.0 / (std::exp(-u) - 1.0);
    }
    throw ParseError("unknown function " + f, n.column);
  }
};

inline Formula parse_formula(const std::string& text) {
  detail::Parser p(text);
  return Formula(p.parse(), text);
}

// ---------------------------------------------------------------------------
// conversion to Expr

namespace detail {

struct Affine {
  Complex slope;
  Complex offset;
};

inline bool depends_on_variable(const Node& n) {
  if (n.op == Node::Op::Variable) return true;
  if (n.op == Node::Op::Call && (n.name == "zero" || n.name == "delta") && n.args.size() == 1) return true;
  for (const auto& a : n.args)
    if (depends_on_variable(*a)) return true;
  return false;
}

inline Complex constant_value(const Node& n) {
  return Formula(std::make_shared<Node>(n), "")(0.0);
}

inline std::optional<Affine> affine(const Node& n) {
  using Op = Node::Op;
  if (!depends_on_variable(n)) return Affine{0.0, constant_value(n)};
  switch (n.op) {
    case Op::Variable:
      return Affine{1.0, 0.0};
    case Op::Neg: {
      auto a = affine(*n.args[0]);
      if (!a) return std::nullopt;
      return Affine{-a->slope, -a->offset};
    }
    case Op::Add:
    case Op::Sub: {
      auto a = affine(*n.args[0]), b = affine(*n.args[1]);
      if (!a || !b) return std::nullopt;
      const double s = n.op == Op::Add ? 1.0 : -1.0;
      return Affine{a->slope + s * b->slope, a->offset + s * b->offset};
    }
    case Op::Mul: {
      auto a = affine(*n.args[0]), b = affine(*n.args[1]);
      if (!a || !b) return std::nullopt;
      if (a->slope == Complex{}) return Affine{a->offset * b->slope, a->offset * b->offset};
      if (b->slope == Complex{}) return Affine{b->offset * a->slope, b->offset * a->offset};
      return std::nullopt;
    }
    case Op::Div: {
      auto a = affine(*n.args[0]), b = affine(*n.args[1]);
      if (!a || !b || b->slope != Complex{} || b->offset == Complex{}) return std::nullopt;
      return Affine{a->slope / b->offset, a->offset / b->offset};
    }
    default:
      return std::nullopt;
  }
}

inline Affine require_affine(const Node& n) {
  auto a = affine(n);
  if (!a || a->slope == Complex{})
    throw UnsupportedError("argument is not affine in the variable");
  return *a;
}

// Argument of the form (z - a): returns a.
inline Complex require_translation(const Node& n) {
  const Affine a = require_affine(n);
  if (a.slope != Complex(1.0)) throw UnsupportedError("argument must have unit slope");
  return -a.offset;
}

// Argument of the form c (z - a) with c real positive: returns (c, a).
inline std::pair<double, Complex> scaled_translation(const Node& n) {
  const Affine a = require_affine(n);
  if (a.slope.imag() != 0.0 || a.slope.real() <= 0.0)
    throw UnsupportedError("argument must have a positive real slope");
  return {a.slope.real(), -a.offset / a.slope};
}

inline Expr to_expr_node(const Node& n);

inline Expr power_to_expr(const Node& n) {
  const Node& base = *n.args[0];
  const Node& exponent = *n.args[1];
  if (depends_on_variable(exponent)) {
    // c^{affine}: exponential
    if (depends_on_variable(base)) throw UnsupportedError("variable exponent with variable base");
    const Complex c = constant_value(base);
    const Affine a = require_affine(exponent);
    const Complex lc = special::log_principal(c);
    return Expr::of(Exponential{a.slope * lc}, std::exp(a.offset * lc));
  }
  const Complex p = constant_value(exponent);
  if (!affine(base)) {
    // integer powers of non-affine bases are repeated products
    if (!special::is_integer(p, 0.0) || p.real() < 1 || p.real() > 16)
      throw UnsupportedError("non-integer power of a non-affine base");
    Expr b = to_expr_node(base), out = Expr::constant(1.0);
    for (int k = 0; k < int(p.real()); ++k) out = multiply(out, b);
    return out;
  }
  const auto [scale, shift] = scaled_translation(base);
  return Expr::of(Monomial{p}, special::cpow(scale, p), shift);
}

inline Expr call_to_expr(const Node& n) {
  const std::string& f = n.name;
  const auto nargs = n.args.size();
  auto constant_arg = [&](std::size_t i) {
    if (depends_on_variable(*n.args[i])) throw UnsupportedError(f + ": parameter must be constant");
    return constant_value(*n.args[i]);
  };
  if (f == "exp" && nargs == 1) {
    const Affine a = require_affine(*n.args[0]);
    return Expr::of(Exponential{a.slope}, std::exp(a.offset));
  }
  if ((f == "sin" || f == "cos") && nargs == 1) {
    const Affine a = require_affine(*n.args[0]);
    return f == "sin" ? Expr::of(Sin{a.slope, a.offset}) : Expr::of(Cos{a.slope, a.offset});
  }
  if ((f == "sinh" || f == "cosh") && nargs == 1) {
    const Affine a = require_affine(*n.args[0]);
    const double sign = f == "sinh" ? -1.0 : 1.0;
    return Expr::of(Exponential{a.slope}, 0.5 * std::exp(a.offset)) +
           Expr::of(Exponential{-a.slope}, sign * 0.5 * std::exp(-a.offset));
  }
  if ((f == "ln" || f == "log") && nargs == 1) {
    const auto [scale, shift] = scaled_translation(*n.args[0]);
    return Expr::of(Log{scale}, 1.0, shift);
  }
  if (f == "H" && nargs == 1) {
    const auto [scale, shift] = scaled_translation(*n.args[0]);
    (void)scale;
    return Expr::of(Heaviside{}, 1.0, shift);
  }
  if (f == "bose" && nargs == 1) return Expr::of(BoseKernel{}, 1.0, require_translation(*n.args[0]));
  if ((f == "zero" || f == "delta") && (nargs == 1 || nargs == 2)) {
    const Complex order = constant_arg(0);
    const Complex shift = nargs == 2 ? require_translation(*n.args[1]) : Complex{};
    return f == "zero" ? Expr::of(ZeroFn{order}, 1.0, shift) : Expr::of(DeltaDeriv{order}, 1.0, shift);
  }
  if (f == "Li" && nargs == 2) {
    const Node& inner = *n.args[1];
    if (inner.op != Node::Op::Call || inner.name != "exp" || inner.args.size() != 1)
      throw UnsupportedError("Li(s, x) is supported symbolically only as Li(s, exp(z - a))");
    return Expr::of(PolylogExp{constant_arg(0)}, 1.0, require_translation(*inner.args[0]));
  }
  if (f == "lnm" && nargs == 3)
    return Expr::of(LogMonomial{constant_arg(0), constant_arg(1)}, 1.0, require_translation(*n.args[2]));
  if (f == "kummer" && nargs == 4)
    return Expr::of(KummerPair{constant_arg(0), constant_arg(1), constant_arg(2)}, 1.0,
                    require_translation(*n.args[3]));
  throw UnsupportedError("no closed-form class for " + f + "(...)");
}

inline Expr to_expr_node(const Node& n) {
  using Op = Node::Op;
  if (!depends_on_variable(n)) return Expr::constant(constant_value(n));
  switch (n.op) {
    case Op::Variable:
      if (n.name == "y") throw UnsupportedError("the dependent variable y has no closed form");
      return Expr::of(Monomial{1.0});
    case Op::Add:
      return to_expr_node(*n.args[0]) + to_expr_node(*n.args[1]);
    case Op::Sub:
      return to_expr_node(*n.args[0]) - to_expr_node(*n.args[1]);
    case Op::Neg:
      return Complex(-1.0) * to_expr_node(*n.args[0]);
    case Op::Mul:
      return multiply(to_expr_node(*n.args[0]), to_expr_node(*n.args[1]));
    case Op::Div: {
      if (depends_on_variable(*n.args[1])) {
        // a / (z - c)^p  ->  a * (z - c)^{-p}
        const Node& d = *n.args[1];
        if (d.op == Op::Pow && !depends_on_variable(*d.args[1])) {
          auto inv = std::make_shared<Node>(d);
          auto neg = std::make_shared<Node>();
          neg->op = Op::Neg;
          neg->args = {d.args[1]};
          inv->args = {d.args[0], neg};
          return multiply(to_expr_node(*n.args[0]), power_to_expr(*inv));
        }
        throw UnsupportedError("division by a non-power expression");
      }
      return (1.0 / constant_value(*n.args[1])) * to_expr_node(*n.args[0]);
    }
    case Op::Pow:
      return power_to_expr(n);
    case Op::Call:
      return call_to_expr(n);
    case Op::Number:
      break;
  }
  return Expr::constant(n.value);
}

}  // namespace detail

/// Convert a formula into the normalized closed-form representation.
inline Expr to_expr(const Formula& f) { return normalize(detail::to_expr_node(f.root())); }

inline Expr parse_expr(const std::string& text) { return to_expr(parse_formula(text)); }

}  // namespace fracdd
