#include "admdae/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "admdae/error.hpp"

namespace admdae {

namespace {

double max_abs(const DenseVector& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

double max_abs(const PolyVector& x, int max_degree) {
  double m = 0.0;
  for (const auto& p : x)
    for (int k = 0; k <= std::min(max_degree, p.cap()); ++k) m = std::max(m, std::abs(p.coeff(k)));
  return m;
}

PolyVector constant_vector(const std::vector<double>& values, int cap) {
  PolyVector out;
  out.reserve(values.size());
  for (double x : values) out.push_back(TimePoly::constant(x, cap));
  return out;
}

PolyVector sum_orders(const std::vector<PolyVector>& components, std::size_t count, std::size_t n, int cap) {
  PolyVector total = zeros(n, cap);
  for (std::size_t k = 0; k < count && k < components.size(); ++k) total = total + components[k];
  return total;
}

void require_structure(const StructureReport& s) {
  if (!s.full_row_rank)
    throw Error(Errc::rank_deficient, "G(p0) has rank " + std::to_string(s.jacobian_rank) +
                                          " < " + std::to_string(s.constraint_count));
  if (!s.mass_invertible)
    throw Error(Errc::singular_mass_matrix, "M(p0) is singular or ill-conditioned");
  if (!s.positive_on_kernel)
    throw Error(Errc::indefinite_on_kernel, "M(p0) is not positive definite on Ker G(p0)");
  if (!s.saddle_nonsingular) throw Error(Errc::singular_schur, "saddle matrix is singular");
}

}  // namespace

ConsistencyReport check_consistency(const MechanicalSystem& sys, double tol) {
  const auto& p0 = sys.initial_position();
  const auto& v0 = sys.initial_velocity();
  ConsistencyReport r;
  r.tolerance = tol;
  r.position_residual = max_abs(sys.constraints_at(p0));
  const DenseVector v = Eigen::Map<const DenseVector>(v0.data(), static_cast<Eigen::Index>(v0.size()));
  r.velocity_residual = max_abs(DenseVector(sys.jacobian_at(p0) * v));
  return r;
}

SeriesSolution solve_series(const MechanicalSystem& sys, int order) {
  if (order < 3) throw Error(Errc::invalid_argument, "order must be at least 3");

  const ConsistencyReport consistency = check_consistency(sys);
  if (!consistency.passed()) {
    std::ostringstream msg;
    msg << "inconsistent initial data: |g(p0)| = " << consistency.position_residual
        << ", |G(p0) v0| = " << consistency.velocity_residual;
    throw Error(Errc::inconsistent_initial_data, msg.str());
  }

  const std::size_t np = sys.coordinate_count();
  const std::size_t nl = sys.constraint_count();
  const int cap = order;
  const auto& p0 = sys.initial_position();
  const auto& v0 = sys.initial_velocity();

  const DenseMatrix m0 = sys.mass_at(p0);
  const DenseMatrix g0 = sys.jacobian_at(p0);
  SeriesSolution sol;
  sol.order = order;
  sol.origin = sys.time_origin();
  sol.structure = diagnostics(m0, g0);
  require_structure(sol.structure);

  const Factorization mass(m0);
  const SchurComplement schur = schur_complement(mass, g0);
  const DenseMatrix g0t = g0.transpose();

  ComponentHistory& hist = sol.history;
  hist.degree_cap = cap;
  hist.n_coordinates = np;
  hist.parameters.assign(sys.symbols().parameter_values().begin(), sys.symbols().parameter_values().end());
  hist.time_origin = sys.time_origin();
  hist.p.push_back(constant_vector(p0, cap));
  hist.v.push_back(constant_vector(v0, cap));
  PolyVector p1;
  for (const auto& c : hist.v[0]) p1.push_back(integrate(c));
  hist.p.push_back(std::move(p1));

  // Adomian sequences of M(p), G^T(p), f(p, v, t); filled order by order.
  std::vector<PolyMatrix> mass_seq;
  std::vector<PolyMatrix> gt_seq;
  std::vector<PolyVector> force_seq;
  std::vector<PolyVector> rhs_seq;  // (f - G^T lambda)^(k)
  auto extend_sequences = [&](int k) {
    while (static_cast<int>(mass_seq.size()) <= k) {
      const int n = static_cast<int>(mass_seq.size());
      mass_seq.push_back(adomian_of(sys.mass(), hist, n));
      gt_seq.push_back(adomian_of(sys.jacobian(), hist, n).transposed());
      force_seq.push_back(adomian_of(std::span<const Expr>(sys.force()), hist, n));
    }
  };

  for (int n = 2; n < order; ++n) {
    if (const int k = n - 3; k >= 0) {
      extend_sequences(k);
      rhs_seq.push_back(force_seq[k] - adomian_matrix_product(gt_seq, hist.lambda, k));
      sol.z.push_back(adomian_matrix_inverse_apply(mass_seq, rhs_seq, sol.z, k, mass));
    }
    extend_sequences(n - 2);

    PolyVector integrand = force_seq[n - 2];
    for (int k = 0; k <= n - 3; ++k) {
      integrand = integrand - gt_seq[n - 2 - k] * hist.lambda[k];
      integrand = integrand - mass_seq[n - 2 - k] * sol.z[k];
    }
    const PolyVector r = integrate_twice(truncated(integrand, cap - 2));
    // g^(n) is affine in p^(n) with slope G(p0); with p^(n) still absent it
    // yields the remaining terms of the order-n constraint.
    const PolyVector s = -1.0 * adomian_of(std::span<const Expr>(sys.constraints()), hist, n);

    const PolyVector minv_r = mass.solve(r);
    const PolyVector y = schur.factor.solve(g0 * minv_r - s);  // L^{-2} lambda^(n-2)
    PolyVector lambda = derivative(derivative(y));
    PolyVector pn = mass.solve(r - g0t * y);

    sol.balance_residual = std::max({sol.balance_residual, max_abs(m0 * pn + g0t * y - r, cap),
                                     max_abs(g0 * pn - s, cap)});
    hist.p.push_back(pn);
    hist.v.push_back(derivative(pn));
    hist.lambda.push_back(std::move(lambda));
    sol.constraint_residual = std::max(
        sol.constraint_residual, max_abs(adomian_of(std::span<const Expr>(sys.constraints()), hist, n), cap));
  }

  sol.p = sum_orders(hist.p, static_cast<std::size_t>(order), np, cap);
  sol.v = sum_orders(hist.v, static_cast<std::size_t>(order - 1), np, cap);
  sol.lambda = sum_orders(hist.lambda, static_cast<std::size_t>(order - 2), nl, cap);
  return sol;
}

StructuralResiduals structural_residuals(const MechanicalSystem& sys, const SeriesSolution& sol) {
  const int order = sol.order;
  const int cap = sol.history.degree_cap;
  const GradedSeries args = sol.history.graded(order - 1);
  auto summed = [&](const Expr& e) {
    const auto grades = compose(e, args);
    TimePoly total(cap);
    for (const auto& g : grades) total += g;
    return total;
  };

  StructuralResiduals out;
  for (const auto& g : sys.constraints()) {
    const TimePoly total = summed(g);
    for (int k = 0; k <= order - 1; ++k)
      out.constraint_series = std::max(out.constraint_series, std::abs(total.coeff(k)));
  }

  const std::size_t np = sys.coordinate_count();
  const std::size_t nl = sys.constraint_count();
  const PolyVector accel = derivative(derivative(sol.p));
  for (std::size_t i = 0; i < np; ++i) {
    TimePoly d = -summed(sys.force()[i]);
    for (std::size_t j = 0; j < np; ++j) d += summed(sys.mass()(i, j)) * accel[j];
    for (std::size_t j = 0; j < nl; ++j) d += summed(sys.jacobian()(j, i)) * sol.lambda[j];
    for (int k = 0; k <= order - 3; ++k) out.ode_defect = std::max(out.ode_defect, std::abs(d.coeff(k)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multistage

const Stage& StagedSolution::stage_at(double t) const {
  if (stages.empty()) throw Error(Errc::invalid_argument, "empty staged solution");
  for (const auto& s : stages)
    if (t < s.end) return s;
  return stages.back();
}

std::vector<double> StagedSolution::position(double t) const {
  const Stage& s = stage_at(t);
  return s.series.position(t - s.begin);
}

std::vector<double> StagedSolution::velocity(double t) const {
  const Stage& s = stage_at(t);
  return s.series.velocity(t - s.begin);
}

std::vector<double> StagedSolution::multiplier(double t) const {
  const Stage& s = stage_at(t);
  return s.series.multiplier(t - s.begin);
}

ProjectedState project_consistent(const MechanicalSystem& sys, std::span<const double> p_hat,
                                  std::span<const double> v_hat) {
  const auto np = static_cast<Eigen::Index>(sys.coordinate_count());
  const auto nl = static_cast<Eigen::Index>(sys.constraint_count());
  const DenseVector target = Eigen::Map<const DenseVector>(p_hat.data(), np);
  DenseVector p = target;
  DenseVector mu = DenseVector::Zero(nl);

  ProjectedState out;
  for (;;) {
    const std::span<const double> ps(p.data(), static_cast<std::size_t>(np));
    const DenseMatrix g = sys.jacobian_at(ps);
    DenseVector residual(np + nl);
    residual.head(np) = p - target + g.transpose() * mu;
    residual.tail(nl) = sys.constraints_at(ps);
    if (max_abs(residual) <= kProjectionTolerance) break;
    if (out.iterations == kProjectionMaxIterations)
      throw Error(Errc::projection_failed, "position projection did not converge in " +
                                               std::to_string(kProjectionMaxIterations) + " iterations");
    DenseMatrix h = DenseMatrix::Identity(np, np);
    for (Eigen::Index j = 0; j < nl; ++j) h += mu[j] * sys.hessian_at(static_cast<std::size_t>(j), ps);
    try {
      const DenseVector step = Factorization(saddle_matrix(h, g)).solve(DenseVector(-residual));
      p += step.head(np);
      mu += step.tail(nl);
    } catch (const Error& e) {
      throw Error(Errc::projection_failed, std::string("projection Newton step failed: ") + e.what());
    }
    ++out.iterations;
  }

  const std::span<const double> ps(p.data(), static_cast<std::size_t>(np));
  const DenseMatrix g = sys.jacobian_at(ps);
  const Factorization mass(sys.mass_at(ps));
  const DenseVector v = Eigen::Map<const DenseVector>(v_hat.data(), np);
  DenseVector v_proj = v;
  if (nl > 0) {
    const SchurComplement schur = schur_complement(mass, g);
    v_proj = v - mass.solve(DenseMatrix(g.transpose())) * schur.factor.solve(DenseVector(g * v));
  }
  out.p.assign(p.data(), p.data() + np);
  out.v.assign(v_proj.data(), v_proj.data() + np);
  return out;
}

StagedSolution single_stage(const MechanicalSystem& sys, double t_end, int order) {
  if (!(t_end > 0.0)) throw Error(Errc::invalid_argument, "t_end must be positive");
  StagedSolution out;
  Stage s;
  s.begin = sys.time_origin();
  s.end = sys.time_origin() + t_end;
  s.series = solve_series(sys, order);
  s.before_projection = check_consistency(sys);
  s.after_projection = s.before_projection;
  out.stages.push_back(std::move(s));
  return out;
}

StagedSolution multistage_solve(const MechanicalSystem& sys, double t_end, double h, int order) {
  if (!(t_end > 0.0)) throw Error(Errc::invalid_argument, "t_end must be positive");
  if (!(h > 0.0)) throw Error(Errc::invalid_argument, "stage length must be positive");
  if (order < 3) throw Error(Errc::invalid_argument, "order must be at least 3");

  const double ratio = t_end / h;
  const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-12 * ratio)));
  if (count == 1) return single_stage(sys, t_end, order);

  const double t0 = sys.time_origin();
  StagedSolution out;
  MechanicalSystem current = sys;
  for (std::size_t i = 0; i < count; ++i) {
    Stage s;
    s.begin = t0 + static_cast<double>(i) * h;
    s.end = i + 1 == count ? t0 + t_end : t0 + static_cast<double>(i + 1) * h;
    if (i == 0) {
      s.before_projection = check_consistency(current);
      s.after_projection = s.before_projection;
    } else {
      const Stage& prev = out.stages.back();
      const double tau = prev.end - prev.begin;
      const auto p_hat = prev.series.position(tau);
      const auto v_hat = prev.series.velocity(tau);
      s.before_projection = check_consistency(current.with_initial_state(p_hat, v_hat, s.begin));
      ProjectedState proj = project_consistent(current, p_hat, v_hat);
      s.projection_iterations = proj.iterations;
      current = current.with_initial_state(std::move(proj.p), std::move(proj.v), s.begin);
      s.after_projection = check_consistency(current);
    }
    s.series = solve_series(current, order);
    out.stages.push_back(std::move(s));
  }
  return out;
}

double default_stage_length(const MechanicalSystem& sys, double t_end) {
  double vmax = 0.0;
  for (double x : sys.initial_velocity()) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0.0) return t_end;
  return std::min(t_end, 0.5 / vmax);
}

}  // namespace admdae
