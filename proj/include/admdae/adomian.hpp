#pragma once

#include <span>
#include <vector>

#include "admdae/expr.hpp"
#include "admdae/linalg.hpp"
#include "admdae/series.hpp"

namespace admdae {

/// Solution components of each order for positions, velocities and
/// multipliers. `p[n][i]` is the order-n component of coordinate i.
struct ComponentHistory {
  int degree_cap = 0;
  std::size_t n_coordinates = 0;
  std::vector<PolyVector> p;
  std::vector<PolyVector> v;
  std::vector<PolyVector> lambda;
  std::vector<double> parameters;
  double time_origin = 0.0;

  /// Positions and velocities graded by order, grades 0..grade_cap. Orders
  /// not yet present contribute zero.
  GradedSeries graded(int grade_cap) const;
};

/// Order-n Adomian polynomial of a scalar, vector or matrix expression.
TimePoly adomian_of(const Expr& e, const ComponentHistory& hist, int n);
PolyVector adomian_of(std::span<const Expr> es, const ComponentHistory& hist, int n);
PolyMatrix adomian_of(const ExprMatrix& es, const ComponentHistory& hist, int n);

/// Order-k term of z = A v: sum_{l=0..k} A^(l) v^(k-l).
PolyVector adomian_matrix_product(std::span<const PolyMatrix> a, std::span<const PolyVector> v, int k);

/// Order-k term of z = A^{-1} v from A^(0) z^(k) = v^(k) - sum_{l<k} A^(k-l) z^(l).
/// `z` must hold z^(0..k-1); `a0` factors A^(0).
PolyVector adomian_matrix_inverse_apply(std::span<const PolyMatrix> a, std::span<const PolyVector> v,
                                        std::span<const PolyVector> z, int k, const Factorization& a0);

/// Symbolic Adomian polynomial built from the derivative recursion
///   N^(n) = (1/n) sum_k sum_{i<n} (i+1) x_k^(i+1) dN^(n-1-i)/dx_k^(0).
/// Each coordinate and velocity x_k of the source table is replaced by fresh
/// component symbols x_k^(0..n), declared as coordinates of `symbols`.
struct RecursionOracle {
  SymbolTable symbols;
  Expr polynomial;
  int order = 0;
  std::size_t variable_count = 0;

  /// Coordinate index in `symbols` of component `order` of source slot `slot`
  /// (slots as in GradedSeries).
  std::size_t index(std::size_t slot, int component_order) const {
    return slot * static_cast<std::size_t>(order + 1) + static_cast<std::size_t>(component_order);
  }
};

RecursionOracle adomian_via_recursion(const Expr& e, const SymbolTable& table, int n);

}  // namespace admdae
