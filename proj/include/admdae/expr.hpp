#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace admdae {

enum class SymbolKind { coordinate, velocity, time, parameter };

/// A resolved reference into a SymbolTable. Time has index 0.
struct Symbol {
  SymbolKind kind = SymbolKind::time;
  std::size_t index = 0;

  auto operator<=>(const Symbol&) const = default;
};

/// Declared names of a mechanical system: n_p coordinates, n_p velocities,
/// named numeric parameters, and the reserved time symbol `t`.
class SymbolTable {
 public:
  static constexpr std::string_view time_name = "t";

  SymbolTable() = default;
  SymbolTable(std::vector<std::string> coordinates, std::vector<std::string> velocities,
              std::vector<std::pair<std::string, double>> parameters = {});

  std::size_t dimension() const noexcept { return coordinates_.size(); }
  const std::vector<std::string>& coordinates() const noexcept { return coordinates_; }
  const std::vector<std::string>& velocities() const noexcept { return velocities_; }
  const std::vector<std::string>& parameter_names() const noexcept { return parameter_names_; }
  std::span<const double> parameter_values() const noexcept { return parameter_values_; }

  std::optional<Symbol> lookup(std::string_view name) const;
  const std::string& name(Symbol s) const;

  static Symbol coordinate(std::size_t i) { return {SymbolKind::coordinate, i}; }
  static Symbol velocity(std::size_t i) { return {SymbolKind::velocity, i}; }
  static Symbol time() { return {SymbolKind::time, 0}; }
  static Symbol parameter(std::size_t i) { return {SymbolKind::parameter, i}; }

 private:
  std::vector<std::string> coordinates_;
  std::vector<std::string> velocities_;
  std::vector<std::string> parameter_names_;
  std::vector<double> parameter_values_;
};

/// Numeric values for every symbol kind, used by evaluate().
struct Bindings {
  std::span<const double> coordinates;
  std::span<const double> velocities;
  std::span<const double> parameters;
  double time = 0.0;

  double value(Symbol s) const;
};

enum class NodeKind { constant, variable, negate, add, subtract, multiply, divide, power, function };
enum class Function { sin, cos, exp, log, sqrt };

const char* function_name(Function f) noexcept;
std::optional<Function> function_from_name(std::string_view name) noexcept;

/// Immutable expression tree with shared structure. Copies are cheap.
///
/// The arithmetic operators below fold constants and drop +0, *1, *0 so that
/// derivative trees stay small. Use the `make_*` factories when the exact
/// structure must be kept (the parser does).
class Expr {
 public:
  Expr();  // constant 0

  static Expr constant(double value);
  static Expr variable(Symbol symbol, std::string name);
  static Expr make_negate(Expr operand);
  static Expr make_binary(NodeKind kind, Expr lhs, Expr rhs);
  static Expr make_power(Expr base, int exponent);
  static Expr make_function(Function f, Expr argument);

  NodeKind kind() const noexcept;
  bool is_constant() const noexcept { return kind() == NodeKind::constant; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

  double value() const;
  Symbol symbol() const;
  const std::string& name() const;
  int exponent() const;
  Function function() const;
  /// Operand of negate/power/function nodes, left operand of binary nodes.
  const Expr& lhs() const;
  const Expr& rhs() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);
Expr apply(Function f, const Expr& argument);

/// Parses `text` against the grammar
///   expr := term (('+'|'-') term)*;  term := factor (('*'|'/') factor)*;
///   factor := unary ('^' integer)?;  unary := '-'? atom;
///   atom := number | identifier | function '(' expr ')' | '(' expr ')'
/// A unary minus applied directly to a number literal becomes a negative constant.
Expr parse_expression(std::string_view text, const SymbolTable& symbols);

/// Fully parenthesized infix form that re-parses to the same tree.
std::string render(const Expr& e);

double evaluate(const Expr& e, const Bindings& bindings);

Expr differentiate(const Expr& e, Symbol var);

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(Symbol)>& replacement);

std::set<Symbol> free_symbols(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

/// Row-major matrix of expressions.
struct ExprMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Expr> entries;

  const Expr& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  Expr& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
};

ExprMatrix jacobian(std::span<const Expr> exprs, std::span<const Symbol> vars);

}  // namespace admdae
