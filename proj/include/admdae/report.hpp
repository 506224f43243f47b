#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "admdae/config.hpp"
#include "admdae/solver.hpp"

namespace admdae {

/// `count` uniformly spaced times from t0 to t1 inclusive (count >= 2).
std::vector<double> sample_times(double t0, double t1, std::size_t count);

/// CSV with header t,p1..,v1..,lambda1.. and one row per sample, values
/// printed with 17 significant digits.
void write_solution_csv(const StagedSolution& sol, std::size_t samples, std::ostream& out);
void sample_and_export(const StagedSolution& sol, std::size_t samples, const std::filesystem::path& path);

struct ResidualReport {
  std::vector<double> t;
  std::vector<double> position;  // |g(p(t))|_inf
  std::vector<double> velocity;  // |G(p(t)) v(t)|_inf
  std::vector<double> defect;    // |M(p) p'' - f(p, v, t) + G^T(p) lambda|_inf
  // Present when the matching reference component was supplied.
  std::optional<std::vector<double>> err_p;
  std::optional<std::vector<double>> err_v;
  std::optional<std::vector<double>> err_lambda;

  double max_position() const;
  double max_velocity() const;
  double max_defect() const;
  std::optional<double> max_err_p() const;
  std::optional<double> max_err_v() const;
  std::optional<double> max_err_lambda() const;
};

/// Samples are split across `jobs` threads; the result does not depend on it.
ResidualReport residual_report(const MechanicalSystem& sys, const StagedSolution& sol, std::size_t samples,
                               const ReferenceSolution* reference = nullptr, unsigned jobs = 1);

/// Header t,g_res,gv_res,defect,err_p,err_v,err_lambda; error columns are
/// left blank without a reference.
void write_residual_csv(const ResidualReport& report, std::ostream& out);
void write_residual_csv(const ResidualReport& report, const std::filesystem::path& path);

/// Human-readable polynomial with small rational coefficients shown as
/// fractions, e.g. "1 - t^2/2 + t^4/24".
std::string format_series(const TimePoly& p, double zero_tol = 1e-14);

}  // namespace admdae
