#pragma once

#include <Eigen/Dense>
#include <optional>

#include "admdae/series.hpp"

namespace admdae {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

/// Condition estimates above this are reported as near-singular.
inline constexpr double kNearSingularCondition = 1e12;
/// Relative threshold for numerical rank decisions.
inline constexpr double kRankThreshold = 1e-10;

/// Partial-pivot LU of a square matrix. Immutable once built; concurrent
/// solves against one factorization are safe.
class Factorization {
 public:
  /// Throws singular_matrix on an exactly zero pivot, dimension_mismatch if
  /// `a` is not square.
  explicit Factorization(const DenseMatrix& a);

  Eigen::Index size() const noexcept { return lu_.rows(); }
  double rcond() const noexcept { return rcond_; }
  bool near_singular() const noexcept { return rcond_ * kNearSingularCondition < 1.0; }
  const Eigen::PartialPivLU<DenseMatrix>& lu() const noexcept { return lu_; }

  DenseMatrix solve(const DenseMatrix& b) const;
  DenseVector solve(const DenseVector& b) const;
  /// Coefficientwise solve of a polynomial right-hand side.
  PolyVector solve(const PolyVector& b) const;

 private:
  Eigen::PartialPivLU<DenseMatrix> lu_;
  double rcond_ = 0.0;
};

inline Factorization lu_factor(const DenseMatrix& a) { return Factorization(a); }

/// G M^{-1} G^T together with its factorization, built once per stage.
struct SchurComplement {
  DenseMatrix matrix;
  Factorization factor;
};

/// Throws rank_deficient if G lacks full row rank, singular_schur if the
/// product cannot be factored.
SchurComplement schur_complement(const Factorization& mass, const DenseMatrix& g);

int numerical_rank(const DenseMatrix& a, double relative_threshold = kRankThreshold);

/// Orthonormal basis of Ker a, one column per null direction.
DenseMatrix kernel_basis(const DenseMatrix& a, double relative_threshold = kRankThreshold);

DenseMatrix saddle_matrix(const DenseMatrix& m, const DenseMatrix& g);

struct StructureReport {
  int constraint_count = 0;
  int jacobian_rank = 0;
  bool full_row_rank = false;
  bool mass_invertible = false;
  double mass_rcond = 0.0;
  /// Smallest eigenvalue of Z^T M Z over an orthonormal kernel basis Z of G;
  /// empty when the kernel is trivial.
  std::optional<double> kernel_min_eigenvalue;
  bool positive_on_kernel = false;
  bool saddle_nonsingular = false;

  bool ok() const noexcept {
    return full_row_rank && mass_invertible && positive_on_kernel && saddle_nonsingular;
  }
};

StructureReport diagnostics(const DenseMatrix& m0, const DenseMatrix& g0);

PolyVector operator*(const DenseMatrix& a, const PolyVector& v);

}  // namespace admdae
