#include "admdae/linalg.hpp"

#include <string>

#include "admdae/error.hpp"

namespace admdae {

Factorization::Factorization(const DenseMatrix& a) {
  if (a.rows() != a.cols())
    throw Error(Errc::dimension_mismatch, "cannot factor a " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + " matrix");
  if (!a.allFinite()) throw Error(Errc::invalid_argument, "matrix has non-finite entries");
  lu_.compute(a);
  const auto diag = lu_.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (diag[i] == 0.0)
      throw Error(Errc::singular_matrix, "zero pivot in column " + std::to_string(i));
  rcond_ = a.size() == 0 ? 1.0 : lu_.rcond();
}

DenseMatrix Factorization::solve(const DenseMatrix& b) const {
  if (b.rows() != size()) throw Error(Errc::dimension_mismatch, "right-hand side has wrong row count");
  return lu_.solve(b);
}

DenseVector Factorization::solve(const DenseVector& b) const {
  if (b.size() != size()) throw Error(Errc::dimension_mismatch, "right-hand side has wrong length");
  return lu_.solve(b);
}

PolyVector Factorization::solve(const PolyVector& b) const {
  if (static_cast<Eigen::Index>(b.size()) != size())
    throw Error(Errc::dimension_mismatch, "right-hand side has wrong length");
  if (b.empty()) return {};
  const int cap = b.front().cap();
  PolyVector x = zeros(b.size(), cap);
  DenseMatrix rhs(size(), cap + 1);
  for (Eigen::Index i = 0; i < size(); ++i)
    for (int k = 0; k <= cap; ++k) rhs(i, k) = b[i].coeff(k);
  const DenseMatrix sol = lu_.solve(rhs);
  for (Eigen::Index i = 0; i < size(); ++i)
    for (int k = 0; k <= cap; ++k) x[i].set_coeff(k, sol(i, k));
  return x;
}

int numerical_rank(const DenseMatrix& a, double relative_threshold) {
  if (a.size() == 0) return 0;
  Eigen::FullPivLU<DenseMatrix> lu(a);
  lu.setThreshold(relative_threshold);
  return static_cast<int>(lu.rank());
}

DenseMatrix kernel_basis(const DenseMatrix& a, double relative_threshold) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return DenseMatrix::Identity(n, n);
  Eigen::JacobiSVD<DenseMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > relative_threshold * smax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

SchurComplement schur_complement(const Factorization& mass, const DenseMatrix& g) {
  if (g.cols() != mass.size())
    throw Error(Errc::dimension_mismatch, "constraint Jacobian has wrong column count");
  const int rank = numerical_rank(g);
  if (rank != g.rows())
    throw Error(Errc::rank_deficient, "constraint Jacobian has rank " + std::to_string(rank) +
                                          ", expected " + std::to_string(g.rows()));
  DenseMatrix s = g * mass.solve(DenseMatrix(g.transpose()));
  try {
    Factorization f(s);
    return {std::move(s), std::move(f)};
  } catch (const Error& e) {
    throw Error(Errc::singular_schur, std::string("Schur complement G M^-1 G^T: ") + e.what());
  }
}

DenseMatrix saddle_matrix(const DenseMatrix& m, const DenseMatrix& g) {
  const Eigen::Index np = m.rows();
  const Eigen::Index nl = g.rows();
  DenseMatrix k = DenseMatrix::Zero(np + nl, np + nl);
  k.topLeftCorner(np, np) = m;
  k.topRightCorner(np, nl) = g.transpose();
  k.bottomLeftCorner(nl, np) = g;
  return k;
}

StructureReport diagnostics(const DenseMatrix& m0, const DenseMatrix& g0) {
  if (m0.rows() != m0.cols() || g0.cols() != m0.rows())
    throw Error(Errc::dimension_mismatch, "mass matrix and Jacobian shapes disagree");
  StructureReport r;
  r.constraint_count = static_cast<int>(g0.rows());
  r.jacobian_rank = numerical_rank(g0);
  r.full_row_rank = r.jacobian_rank == r.constraint_count;

  try {
    Factorization f(m0);
    r.mass_rcond = f.rcond();
    r.mass_invertible = !f.near_singular();
  } catch (const Error&) {
    r.mass_rcond = 0.0;
    r.mass_invertible = false;
  }

  const DenseMatrix z = kernel_basis(g0);
  if (z.cols() > 0) {
    const DenseMatrix sym = 0.5 * (m0 + m0.transpose());
    const DenseMatrix reduced = z.transpose() * sym * z;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(reduced, Eigen::EigenvaluesOnly);
    r.kernel_min_eigenvalue = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, m0.norm());
    r.positive_on_kernel = *r.kernel_min_eigenvalue > kRankThreshold * scale;
  } else {
    r.positive_on_kernel = true;
  }

  Eigen::FullPivLU<DenseMatrix> saddle(saddle_matrix(m0, g0));
  saddle.setThreshold(kRankThreshold);
  r.saddle_nonsingular = saddle.isInvertible();
  return r;
}

PolyVector operator*(const DenseMatrix& a, const PolyVector& v) {
  if (static_cast<std::size_t>(a.cols()) != v.size())
    throw Error(Errc::dimension_mismatch, "matrix-vector size mismatch");
  const int cap = v.empty() ? 0 : v.front().cap();
  PolyVector out = zeros(static_cast<std::size_t>(a.rows()), cap);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) out[i] += v[j] * a(i, j);
  return out;
}

}  // namespace admdae
