#include "admdae/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "admdae/error.hpp"

namespace admdae {

// ---------------------------------------------------------------------------
// SymbolTable

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace

SymbolTable::SymbolTable(std::vector<std::string> coordinates, std::vector<std::string> velocities,
                         std::vector<std::pair<std::string, double>> parameters)
    : coordinates_(std::move(coordinates)), velocities_(std::move(velocities)) {
  if (coordinates_.size() != velocities_.size())
    throw Error(Errc::invalid_symbol_table, "coordinate and velocity lists differ in length (" +
                                                std::to_string(coordinates_.size()) + " vs " +
                                                std::to_string(velocities_.size()) + ")");
  for (auto& [name, value] : parameters) {
    parameter_names_.push_back(name);
    parameter_values_.push_back(value);
  }
  std::unordered_set<std::string> seen;
  auto declare = [&](const std::string& name) {
    if (!is_identifier(name))
      throw Error(Errc::invalid_symbol_table, "invalid symbol name '" + name + "'");
    if (name == time_name)
      throw Error(Errc::invalid_symbol_table, "'t' is reserved for time");
    if (function_from_name(name))
      throw Error(Errc::invalid_symbol_table, "'" + name + "' is a function name");
    if (!seen.insert(name).second)
      throw Error(Errc::invalid_symbol_table, "duplicate symbol '" + name + "'");
  };
  for (const auto& n : coordinates_) declare(n);
  for (const auto& n : velocities_) declare(n);
  for (const auto& n : parameter_names_) declare(n);
}

std::optional<Symbol> SymbolTable::lookup(std::string_view name) const {
  if (name == time_name) return time();
  for (std::size_t i = 0; i < coordinates_.size(); ++i)
    if (coordinates_[i] == name) return coordinate(i);
  for (std::size_t i = 0; i < velocities_.size(); ++i)
    if (velocities_[i] == name) return velocity(i);
  for (std::size_t i = 0; i < parameter_names_.size(); ++i)
    if (parameter_names_[i] == name) return parameter(i);
  return std::nullopt;
}

const std::string& SymbolTable::name(Symbol s) const {
  static const std::string t(time_name);
  switch (s.kind) {
    case SymbolKind::coordinate: return coordinates_.at(s.index);
    case SymbolKind::velocity: return velocities_.at(s.index);
    case SymbolKind::parameter: return parameter_names_.at(s.index);
    case SymbolKind::time: return t;
  }
  return t;
}

double Bindings::value(Symbol s) const {
  auto pick = [&](std::span<const double> values, const char* what) {
    if (s.index >= values.size())
      throw Error(Errc::invalid_argument, std::string("no binding for ") + what + " " +
                                              std::to_string(s.index));
    return values[s.index];
  };
  switch (s.kind) {
    case SymbolKind::coordinate: return pick(coordinates, "coordinate");
    case SymbolKind::velocity: return pick(velocities, "velocity");
    case SymbolKind::parameter: return pick(parameters, "parameter");
    case SymbolKind::time: return time;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Nodes

struct Expr::Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  Symbol symbol{};
  std::string name;
  int exponent = 0;
  Function function = Function::sin;
  Expr lhs_;
  Expr rhs_;
};

namespace {

constexpr std::array<std::pair<Function, const char*>, 5> kFunctions{{
    {Function::sin, "sin"},
    {Function::cos, "cos"},
    {Function::exp, "exp"},
    {Function::log, "log"},
    {Function::sqrt, "sqrt"},
}};

}  // namespace

const char* function_name(Function f) noexcept {
  for (auto& [fn, name] : kFunctions)
    if (fn == f) return name;
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) noexcept {
  for (auto& [fn, n] : kFunctions)
    if (name == n) return fn;
  return std::nullopt;
}

// The default-constructed Expr must not recurse into Node's own Expr members,
// so the zero node is built lazily with empty children.
Expr::Expr() {
  static const auto zero = [] {
    auto n = std::shared_ptr<Node>(new Node{NodeKind::constant, 0.0, {}, {}, 0, Function::sin,
                                            Expr(nullptr), Expr(nullptr)});
    return std::shared_ptr<const Node>(n);
  }();
  node_ = zero;
}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Symbol symbol, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->symbol = symbol;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::make_negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::negate;
  n->lhs_ = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::make_binary(NodeKind kind, Expr lhs, Expr rhs) {
  if (kind != NodeKind::add && kind != NodeKind::subtract && kind != NodeKind::multiply &&
      kind != NodeKind::divide)
    throw Error(Errc::invalid_argument, "make_binary: not a binary node kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs_ = std::move(lhs);
  n->rhs_ = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::make_power(Expr base, int exponent) {
  if (exponent < 0) throw Error(Errc::non_integer_exponent, "negative exponent");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::power;
  n->exponent = exponent;
  n->lhs_ = std::move(base);
  return Expr(std::move(n));
}

Expr Expr::make_function(Function f, Expr argument) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::function;
  n->function = f;
  n->lhs_ = std::move(argument);
  return Expr(std::move(n));
}

NodeKind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const { return node_->value; }
Symbol Expr::symbol() const { return node_->symbol; }
const std::string& Expr::name() const { return node_->name; }
int Expr::exponent() const { return node_->exponent; }
Function Expr::function() const { return node_->function; }
const Expr& Expr::lhs() const { return node_->lhs_; }
const Expr& Expr::rhs() const { return node_->rhs_; }

// ---------------------------------------------------------------------------
// Folding constructors

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.kind() == NodeKind::negate) return a.lhs();
  return Expr::make_negate(a);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::make_binary(NodeKind::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::make_binary(NodeKind::subtract, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expr::make_binary(NodeKind::multiply, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0)
    return Expr::constant(a.value() / b.value());
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::make_binary(NodeKind::divide, a, b);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) return Expr::constant(std::pow(base.value(), exponent));
  return Expr::make_power(base, exponent);
}

namespace {

double apply_function(Function f, double x) {
  switch (f) {
    case Function::sin: return std::sin(x);
    case Function::cos: return std::cos(x);
    case Function::exp: return std::exp(x);
    case Function::log:
      if (!(x > 0.0)) throw Error(Errc::domain, "log of non-positive argument");
      return std::log(x);
    case Function::sqrt:
      if (x < 0.0) throw Error(Errc::domain, "sqrt of negative argument");
      return std::sqrt(x);
  }
  return 0.0;
}

}  // namespace

Expr apply(Function f, const Expr& argument) {
  if (argument.is_constant()) {
    const double x = argument.value();
    const bool in_domain = (f != Function::log || x > 0.0) && (f != Function::sqrt || x >= 0.0);
    if (in_domain) return Expr::constant(apply_function(f, x));
  }
  return Expr::make_function(f, argument);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail(Errc::syntax, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(Errc code, const std::string& msg) const { throw ParseError(code, pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr expr() {
    Expr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      Expr rhs = term();
      lhs = Expr::make_binary(c == '+' ? NodeKind::add : NodeKind::subtract, lhs, rhs);
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      Expr rhs = factor();
      lhs = Expr::make_binary(c == '*' ? NodeKind::multiply : NodeKind::divide, lhs, rhs);
    }
    return lhs;
  }

  Expr factor() {
    Expr base = unary();
    if (peek() != '^') return base;
    ++pos_;
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
      fail(Errc::non_integer_exponent, "exponent must be a non-negative integer literal");
    std::string_view literal = scan_number();
    if (literal.empty()) fail(Errc::syntax, "expected integer exponent");
    if (literal.find_first_of(".eE") != std::string_view::npos) {
      pos_ = start;
      fail(Errc::non_integer_exponent, "exponent '" + std::string(literal) + "' is not an integer");
    }
    int k = 0;
    auto [ptr, ec] = std::from_chars(literal.data(), literal.data() + literal.size(), k);
    if (ec != std::errc() || ptr != literal.data() + literal.size()) {
      pos_ = start;
      fail(Errc::non_integer_exponent, "exponent '" + std::string(literal) + "' out of range");
    }
    return Expr::make_power(base, k);
  }

  Expr unary() {
    if (peek() != '-') return atom();
    ++pos_;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      Expr number = atom();
      return Expr::constant(-number.value());
    }
    return Expr::make_negate(atom());
  }

  // Decimal with optional fraction and exponent. Returns an empty view if no
  // number starts at the cursor.
  std::string_view scan_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) {
      pos_ = start;
      return {};
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;
    }
    return text_.substr(start, pos_ - start);
  }

  Expr atom() {
    const char c = peek();
    const std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string_view literal = scan_number();
      if (literal.empty()) fail(Errc::syntax, "malformed number");
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(literal.data(), literal.data() + literal.size(), value);
      if (ec != std::errc() || ptr != literal.data() + literal.size()) {
        pos_ = start;
        fail(Errc::syntax, "malformed number '" + std::string(literal) + "'");
      }
      return Expr::constant(value);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (peek() == '(') {
        auto f = function_from_name(ident);
        if (!f) {
          pos_ = start;
          fail(Errc::unknown_function, "unknown function '" + std::string(ident) + "'");
        }
        ++pos_;
        Expr arg = expr();
        expect(')');
        return Expr::make_function(*f, arg);
      }
      auto sym = symbols_.lookup(ident);
      if (!sym) {
        pos_ = start;
        fail(Errc::unknown_identifier, "unknown identifier '" + std::string(ident) + "'");
      }
      return Expr::variable(*sym, std::string(ident));
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (c == '\0') fail(Errc::syntax, "unexpected end of expression");
    fail(Errc::syntax, "unexpected '" + std::string(1, c) + "'");
  }

  void expect(char c) {
    if (peek() != c) fail(Errc::syntax, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view text_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, const SymbolTable& symbols) {
  return Parser(text, symbols).parse();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render_into(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::constant:
      if (std::signbit(e.value())) {
        out += '(';
        out += format_number(e.value());
        out += ')';
      } else {
        out += format_number(e.value());
      }
      return;
    case NodeKind::variable: out += e.name(); return;
    case NodeKind::negate:
      out += "(-";
      // A bare non-negative literal after '-' would fold into a constant on re-parse.
      if (e.lhs().is_constant() && !std::signbit(e.lhs().value())) {
        out += '(';
        render_into(e.lhs(), out);
        out += ')';
      } else {
        render_into(e.lhs(), out);
      }
      out += ')';
      return;
    case NodeKind::add:
    case NodeKind::subtract:
    case NodeKind::multiply:
    case NodeKind::divide: {
      static constexpr char ops[] = {'+', '-', '*', '/'};
      out += '(';
      render_into(e.lhs(), out);
      out += ops[static_cast<int>(e.kind()) - static_cast<int>(NodeKind::add)];
      render_into(e.rhs(), out);
      out += ')';
      return;
    }
    case NodeKind::power:
      out += '(';
      render_into(e.lhs(), out);
      out += '^';
      out += std::to_string(e.exponent());
      out += ')';
      return;
    case NodeKind::function:
      out += function_name(e.function());
      out += '(';
      render_into(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  render_into(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation and calculus

double evaluate(const Expr& e, const Bindings& b) {
  switch (e.kind()) {
    case NodeKind::constant: return e.value();
    case NodeKind::variable: return b.value(e.symbol());
    case NodeKind::negate: return -evaluate(e.lhs(), b);
    case NodeKind::add: return evaluate(e.lhs(), b) + evaluate(e.rhs(), b);
    case NodeKind::subtract: return evaluate(e.lhs(), b) - evaluate(e.rhs(), b);
    case NodeKind::multiply: return evaluate(e.lhs(), b) * evaluate(e.rhs(), b);
    case NodeKind::divide: {
      const double den = evaluate(e.rhs(), b);
      if (den == 0.0) throw Error(Errc::division_by_zero, "division by zero");
      return evaluate(e.lhs(), b) / den;
    }
    case NodeKind::power: return std::pow(evaluate(e.lhs(), b), e.exponent());
    case NodeKind::function: return apply_function(e.function(), evaluate(e.lhs(), b));
  }
  return 0.0;
}

Expr differentiate(const Expr& e, Symbol var) {
  switch (e.kind()) {
    case NodeKind::constant: return Expr::constant(0.0);
    case NodeKind::variable: return Expr::constant(e.symbol() == var ? 1.0 : 0.0);
    case NodeKind::negate: return -differentiate(e.lhs(), var);
    case NodeKind::add: return differentiate(e.lhs(), var) + differentiate(e.rhs(), var);
    case NodeKind::subtract: return differentiate(e.lhs(), var) - differentiate(e.rhs(), var);
    case NodeKind::multiply:
      return differentiate(e.lhs(), var) * e.rhs() + e.lhs() * differentiate(e.rhs(), var);
    case NodeKind::divide: {
      const Expr da = differentiate(e.lhs(), var);
      const Expr db = differentiate(e.rhs(), var);
      if (db.is_constant(0.0)) return da / e.rhs();
      return (da * e.rhs() - e.lhs() * db) / pow(e.rhs(), 2);
    }
    case NodeKind::power: {
      const int k = e.exponent();
      if (k == 0) return Expr::constant(0.0);
      return Expr::constant(k) * pow(e.lhs(), k - 1) * differentiate(e.lhs(), var);
    }
    case NodeKind::function: {
      const Expr& u = e.lhs();
      const Expr du = differentiate(u, var);
      if (du.is_constant(0.0)) return Expr::constant(0.0);
      switch (e.function()) {
        case Function::sin: return apply(Function::cos, u) * du;
        case Function::cos: return -(apply(Function::sin, u) * du);
        case Function::exp: return apply(Function::exp, u) * du;
        case Function::log: return du / u;
        case Function::sqrt: return du / (Expr::constant(2.0) * apply(Function::sqrt, u));
      }
    }
  }
  return Expr::constant(0.0);
}

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(Symbol)>& replacement) {
  switch (e.kind()) {
    case NodeKind::constant: return e;
    case NodeKind::variable: {
      auto r = replacement(e.symbol());
      return r ? *r : e;
    }
    case NodeKind::negate: return -substitute(e.lhs(), replacement);
    case NodeKind::add: return substitute(e.lhs(), replacement) + substitute(e.rhs(), replacement);
    case NodeKind::subtract:
      return substitute(e.lhs(), replacement) - substitute(e.rhs(), replacement);
    case NodeKind::multiply:
      return substitute(e.lhs(), replacement) * substitute(e.rhs(), replacement);
    case NodeKind::divide:
      return substitute(e.lhs(), replacement) / substitute(e.rhs(), replacement);
    case NodeKind::power: return pow(substitute(e.lhs(), replacement), e.exponent());
    case NodeKind::function: return apply(e.function(), substitute(e.lhs(), replacement));
  }
  return e;
}

namespace {

void collect(const Expr& e, std::set<Symbol>& out) {
  switch (e.kind()) {
    case NodeKind::constant: return;
    case NodeKind::variable: out.insert(e.symbol()); return;
    case NodeKind::add:
    case NodeKind::subtract:
    case NodeKind::multiply:
    case NodeKind::divide: collect(e.rhs(), out); [[fallthrough]];
    case NodeKind::negate:
    case NodeKind::power:
    case NodeKind::function: collect(e.lhs(), out); return;
  }
}

}  // namespace

std::set<Symbol> free_symbols(const Expr& e) {
  std::set<Symbol> out;
  collect(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::constant: return a.value() == b.value();
    case NodeKind::variable: return a.symbol() == b.symbol();
    case NodeKind::negate: return structurally_equal(a.lhs(), b.lhs());
    case NodeKind::power:
      return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
    case NodeKind::function:
      return a.function() == b.function() && structurally_equal(a.lhs(), b.lhs());
    default:
      return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
  }
}

ExprMatrix jacobian(std::span<const Expr> exprs, std::span<const Symbol> vars) {
  ExprMatrix j{exprs.size(), vars.size(), {}};
  j.entries.reserve(exprs.size() * vars.size());
  for (const auto& e : exprs)
    for (const auto& v : vars) j.entries.push_back(differentiate(e, v));
  return j;
}

}  // namespace admdae
