#include "admdae/adomian.hpp"

#include <string>

#include "admdae/error.hpp"

namespace admdae {

GradedSeries ComponentHistory::graded(int grade_cap) const {
  GradedSeries s;
  s.grade_cap = grade_cap;
  s.degree_cap = degree_cap;
  s.n_coordinates = n_coordinates;
  s.parameters = parameters;
  s.time_origin = time_origin;
  s.components.assign(2 * n_coordinates, std::vector<TimePoly>(grade_cap + 1, TimePoly(degree_cap)));
  for (int n = 0; n <= grade_cap; ++n) {
    if (n < static_cast<int>(p.size()))
      for (std::size_t i = 0; i < n_coordinates; ++i) s.components[i][n] = p[n].at(i);
    if (n < static_cast<int>(v.size()))
      for (std::size_t i = 0; i < n_coordinates; ++i) s.components[n_coordinates + i][n] = v[n].at(i);
  }
  return s;
}

TimePoly adomian_of(const Expr& e, const ComponentHistory& hist, int n) {
  if (n < 0) throw Error(Errc::invalid_argument, "negative Adomian order");
  return compose(e, hist.graded(n))[n];
}

PolyVector adomian_of(std::span<const Expr> es, const ComponentHistory& hist, int n) {
  if (n < 0) throw Error(Errc::invalid_argument, "negative Adomian order");
  const GradedSeries args = hist.graded(n);
  PolyVector out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(compose(e, args)[n]);
  return out;
}

PolyMatrix adomian_of(const ExprMatrix& es, const ComponentHistory& hist, int n) {
  PolyMatrix out;
  out.rows = es.rows;
  out.cols = es.cols;
  out.entries = adomian_of(std::span<const Expr>(es.entries), hist, n);
  return out;
}

PolyVector adomian_matrix_product(std::span<const PolyMatrix> a, std::span<const PolyVector> v, int k) {
  if (k < 0 || static_cast<std::size_t>(k) >= a.size() || static_cast<std::size_t>(k) >= v.size())
    throw Error(Errc::dimension_mismatch, "sequences do not reach order " + std::to_string(k));
  PolyVector z = a[0] * v[k];
  for (int l = 1; l <= k; ++l) z = z + a[l] * v[k - l];
  return z;
}

PolyVector adomian_matrix_inverse_apply(std::span<const PolyMatrix> a, std::span<const PolyVector> v,
                                        std::span<const PolyVector> z, int k, const Factorization& a0) {
  if (k < 0 || static_cast<std::size_t>(k) >= a.size() || static_cast<std::size_t>(k) >= v.size() ||
      z.size() < static_cast<std::size_t>(k))
    throw Error(Errc::dimension_mismatch, "sequences do not reach order " + std::to_string(k));
  PolyVector rhs = v[k];
  for (int l = 0; l < k; ++l) rhs = rhs - a[k - l] * z[l];
  return a0.solve(rhs);
}

RecursionOracle adomian_via_recursion(const Expr& e, const SymbolTable& table, int n) {
  if (n < 0) throw Error(Errc::invalid_argument, "negative Adomian order");
  const std::size_t np = table.dimension();
  const std::size_t m = 2 * np;

  std::vector<std::string> coords;
  std::vector<std::string> dummies;
  for (std::size_t slot = 0; slot < m; ++slot) {
    const std::string& base =
        slot < np ? table.coordinates()[slot] : table.velocities()[slot - np];
    for (int i = 0; i <= n; ++i) {
      coords.push_back(base + "__" + std::to_string(i));
      dummies.push_back(base + "__" + std::to_string(i) + "__rate");
    }
  }
  std::vector<std::pair<std::string, double>> params;
  for (std::size_t i = 0; i < table.parameter_names().size(); ++i)
    params.emplace_back(table.parameter_names()[i], table.parameter_values()[i]);

  RecursionOracle oracle{SymbolTable(std::move(coords), std::move(dummies), std::move(params)), Expr(), n, m};
  auto component = [&](std::size_t slot, int order) {
    const Symbol s = SymbolTable::coordinate(oracle.index(slot, order));
    return Expr::variable(s, oracle.symbols.name(s));
  };

  std::vector<Expr> levels;
  levels.push_back(substitute(e, [&](Symbol s) -> std::optional<Expr> {
    if (s.kind == SymbolKind::coordinate) return component(s.index, 0);
    if (s.kind == SymbolKind::velocity) return component(np + s.index, 0);
    return std::nullopt;
  }));

  for (int order = 1; order <= n; ++order) {
    Expr sum = Expr::constant(0.0);
    for (std::size_t slot = 0; slot < m; ++slot) {
      const Symbol head = SymbolTable::coordinate(oracle.index(slot, 0));
      for (int i = 0; i < order; ++i) {
        const Expr d = differentiate(levels[order - 1 - i], head);
        sum = sum + Expr::constant(i + 1) * component(slot, i + 1) * d;
      }
    }
    levels.push_back(sum / Expr::constant(order));
  }
  oracle.polynomial = levels[n];
  return oracle;
}

}  // namespace admdae
