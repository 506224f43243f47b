#pragma once

#include <span>
#include <string>
#include <vector>

#include "admdae/expr.hpp"
#include "admdae/linalg.hpp"

namespace admdae {

/// Euler-Lagrange system  p' = v,  M(p) v' = f(p, v, t) - G(p)^T lambda,  0 = g(p)
/// with G = dg/dp, plus initial data (p0, v0) at `time_origin`.
///
/// Mass-matrix and constraint entries may reference coordinates and
/// parameters only; forces may also use velocities and time.
class MechanicalSystem {
 public:
  MechanicalSystem(std::string name, SymbolTable symbols, ExprMatrix mass, std::vector<Expr> force,
                   std::vector<Expr> constraints, std::vector<double> p0, std::vector<double> v0,
                   double time_origin = 0.0);

  const std::string& name() const noexcept { return name_; }
  const SymbolTable& symbols() const noexcept { return symbols_; }
  std::size_t coordinate_count() const noexcept { return symbols_.dimension(); }
  std::size_t constraint_count() const noexcept { return constraints_.size(); }

  const ExprMatrix& mass() const noexcept { return mass_; }
  const std::vector<Expr>& force() const noexcept { return force_; }
  const std::vector<Expr>& constraints() const noexcept { return constraints_; }
  /// dg/dp, n_lambda x n_p.
  const ExprMatrix& jacobian() const noexcept { return jacobian_; }
  /// Second derivatives of each constraint, n_p x n_p each.
  const std::vector<ExprMatrix>& constraint_hessians() const noexcept { return hessians_; }

  const std::vector<double>& initial_position() const noexcept { return p0_; }
  const std::vector<double>& initial_velocity() const noexcept { return v0_; }
  double time_origin() const noexcept { return time_origin_; }

  /// Same equations restarted from new data.
  MechanicalSystem with_initial_state(std::vector<double> p0, std::vector<double> v0,
                                      double time_origin) const;

  DenseMatrix mass_at(std::span<const double> p) const;
  DenseMatrix jacobian_at(std::span<const double> p) const;
  DenseVector force_at(std::span<const double> p, std::span<const double> v, double t) const;
  DenseVector constraints_at(std::span<const double> p) const;
  DenseMatrix hessian_at(std::size_t constraint, std::span<const double> p) const;

 private:
  Bindings bind(std::span<const double> p, std::span<const double> v, double t) const;
  DenseMatrix evaluate_matrix(const ExprMatrix& m, std::span<const double> p) const;

  std::string name_;
  SymbolTable symbols_;
  ExprMatrix mass_;
  std::vector<Expr> force_;
  std::vector<Expr> constraints_;
  ExprMatrix jacobian_;
  std::vector<ExprMatrix> hessians_;
  std::vector<double> p0_;
  std::vector<double> v0_;
  double time_origin_ = 0.0;
};

}  // namespace admdae
