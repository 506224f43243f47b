#pragma once

#include <vector>

#include "admdae/adomian.hpp"
#include "admdae/linalg.hpp"
#include "admdae/system.hpp"

namespace admdae {

inline constexpr double kConsistencyTolerance = 1e-10;
inline constexpr int kDefaultOrder = 8;

struct ConsistencyReport {
  double position_residual = 0.0;  // |g(p0)|_inf
  double velocity_residual = 0.0;  // |G(p0) v0|_inf
  double tolerance = kConsistencyTolerance;

  bool passed() const noexcept {
    return position_residual <= tolerance && velocity_residual <= tolerance;
  }
};

ConsistencyReport check_consistency(const MechanicalSystem& sys, double tol = kConsistencyTolerance);

/// Truncated series solution of one stage. Series are in local time
/// tau = t - origin.
struct SeriesSolution {
  int order = 0;
  double origin = 0.0;
  /// p^(0..order-1), v^(0..order-2), lambda^(0..order-3).
  ComponentHistory history;
  /// z^(k) = (M^{-1}(f - G^T lambda))^(k), k = 0..order-4.
  std::vector<PolyVector> z;
  PolyVector p;
  PolyVector v;
  PolyVector lambda;
  StructureReport structure;
  /// Largest coefficient residual of the per-order block system and of the
  /// order-n constraint polynomial g^(n), over all orders.
  double balance_residual = 0.0;
  double constraint_residual = 0.0;

  std::vector<double> position(double tau) const { return evaluate(p, tau); }
  std::vector<double> velocity(double tau) const { return evaluate(v, tau); }
  std::vector<double> multiplier(double tau) const { return evaluate(lambda, tau); }
};

/// Order-by-order decomposition of the index-3 system. Requires order >= 3,
/// consistent initial data, full-rank G(p0), invertible M(p0) and M(p0)
/// positive definite on Ker G(p0).
SeriesSolution solve_series(const MechanicalSystem& sys, int order = kDefaultOrder);

/// Largest coefficients of the composed constraint series sum_n g^(n)
/// (degrees 0..order-1) and of the ODE defect M(p) p'' - f + G^T lambda
/// (degrees 0..order-3), both formed with truncated series arithmetic.
struct StructuralResiduals {
  double constraint_series = 0.0;
  double ode_defect = 0.0;
};

StructuralResiduals structural_residuals(const MechanicalSystem& sys, const SeriesSolution& sol);

struct Stage {
  double begin = 0.0;
  double end = 0.0;
  SeriesSolution series;
  /// Residuals of the restart data before and after projection onto the
  /// constraint manifold. Stage 0 reports the user's initial data for both.
  ConsistencyReport before_projection;
  ConsistencyReport after_projection;
  int projection_iterations = 0;
};

struct StagedSolution {
  std::vector<Stage> stages;

  double t_begin() const { return stages.front().begin; }
  double t_end() const { return stages.back().end; }
  /// Stage with begin <= t < end; the last stage also owns its end point.
  const Stage& stage_at(double t) const;
  std::vector<double> position(double t) const;
  std::vector<double> velocity(double t) const;
  std::vector<double> multiplier(double t) const;
};

inline constexpr double kProjectionTolerance = 1e-12;
inline constexpr int kProjectionMaxIterations = 25;

struct ProjectedState {
  std::vector<double> p;
  std::vector<double> v;
  int iterations = 0;
};

/// Closest point (Euclidean) to `p_hat` on g(p) = 0 by Newton on the KKT
/// conditions, then the M-orthogonal projection of `v_hat` onto Ker G(p).
ProjectedState project_consistent(const MechanicalSystem& sys, std::span<const double> p_hat,
                                  std::span<const double> v_hat);

/// Restarts solve_series on ceil(t_end / h) abutting intervals.
StagedSolution multistage_solve(const MechanicalSystem& sys, double t_end, double h,
                                int order = kDefaultOrder);

/// One stage covering [origin, origin + t_end].
StagedSolution single_stage(const MechanicalSystem& sys, double t_end, int order = kDefaultOrder);

/// Stage length with |v0|_inf * h <= 0.5, capped at t_end.
double default_stage_length(const MechanicalSystem& sys, double t_end);

}  // namespace admdae
