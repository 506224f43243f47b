#include "admdae/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "admdae/config.hpp"
#include "admdae/error.hpp"
#include "admdae/report.hpp"
#include "admdae/robot.hpp"
#include "admdae/solver.hpp"

namespace admdae {

namespace {

struct SolveFlags {
  std::string config;
  int order = kDefaultOrder;
  double t_end = 1.0;
  std::optional<double> stage;
  std::size_t samples = 101;
  std::string out;
  std::string residuals;
  double tol = 1e-6;
  unsigned jobs = 1;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--config", f.config, "System description (JSON)")->required();
  cmd->add_option("--order", f.order, "Approximation order n0")->capture_default_str()->check(CLI::Range(3, 64));
  cmd->add_option("--t-end", f.t_end, "End of the time window")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--stage", f.stage, "Stage length for multistage restarts (default: single stage)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--samples", f.samples, "Number of uniform output samples")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}));
  cmd->add_option("--residuals", f.residuals, "Write the residual report CSV here");
}

StagedSolution run_solve(const MechanicalSystem& sys, const SolveFlags& f) {
  if (f.stage) return multistage_solve(sys, f.t_end, *f.stage, f.order);
  return single_stage(sys, f.t_end, f.order);
}

int cmd_check(const std::string& path, double tol, std::ostream& out) {
  const LoadedSystem loaded = load_system(path);
  const MechanicalSystem& sys = loaded.system;
  const ConsistencyReport c = check_consistency(sys, tol);
  const StructureReport s = diagnostics(sys.mass_at(sys.initial_position()), sys.jacobian_at(sys.initial_position()));

  out << std::setprecision(6);
  out << "system: " << sys.name() << " (n_p = " << sys.coordinate_count()
      << ", n_lambda = " << sys.constraint_count() << ")\n";
  out << "position consistency |g(p0)|      = " << c.position_residual
      << (c.position_residual <= tol ? "  ok" : "  FAIL") << '\n';
  out << "velocity consistency |G(p0) v0|   = " << c.velocity_residual
      << (c.velocity_residual <= tol ? "  ok" : "  FAIL") << '\n';
  out << "rank G(p0)                        = " << s.jacobian_rank << " of " << s.constraint_count
      << (s.full_row_rank ? "  ok" : "  FAIL") << '\n';
  out << "M(p0) reciprocal condition        = " << s.mass_rcond << (s.mass_invertible ? "  ok" : "  FAIL") << '\n';
  out << "min eigenvalue of M on Ker G(p0)  = ";
  if (s.kernel_min_eigenvalue) out << *s.kernel_min_eigenvalue;
  else out << "(trivial kernel)";
  out << (s.positive_on_kernel ? "  ok" : "  FAIL") << '\n';
  out << "saddle matrix                     = " << (s.saddle_nonsingular ? "nonsingular  ok" : "singular  FAIL")
      << '\n';
  const bool pass = c.passed() && s.ok();
  out << (pass ? "check passed" : "check FAILED") << '\n';
  return pass ? 0 : 1;
}

int cmd_solve(const SolveFlags& f, std::ostream& out) {
  const LoadedSystem loaded = load_system(f.config);
  const StagedSolution sol = run_solve(loaded.system, f);
  if (f.out.empty()) {
    write_solution_csv(sol, f.samples, out);
  } else {
    sample_and_export(sol, f.samples, f.out);
    out << "wrote " << f.samples << " samples to " << f.out << '\n';
  }
  if (!f.residuals.empty()) {
    const ResidualReport r =
        residual_report(loaded.system, sol, f.samples, loaded.reference ? &*loaded.reference : nullptr, f.jobs);
    write_residual_csv(r, f.residuals);
  }
  return 0;
}

int cmd_verify(const SolveFlags& f, std::ostream& out) {
  const LoadedSystem loaded = load_system(f.config);
  const StagedSolution sol = run_solve(loaded.system, f);
  const ResidualReport r =
      residual_report(loaded.system, sol, f.samples, loaded.reference ? &*loaded.reference : nullptr, f.jobs);
  if (!f.residuals.empty()) write_residual_csv(r, f.residuals);
  if (!f.out.empty()) sample_and_export(sol, f.samples, f.out);

  out << std::setprecision(6);
  out << "system: " << loaded.system.name() << ", order " << f.order << ", " << sol.stages.size()
      << " stage(s) on [" << sol.t_begin() << ", " << sol.t_end() << "], " << f.samples << " samples\n";
  const bool g_ok = r.max_position() <= f.tol;
  const bool gv_ok = r.max_velocity() <= f.tol;
  out << "max |g(p)|        = " << r.max_position() << (g_ok ? "  ok" : "  FAIL") << '\n';
  out << "max |G(p) v|      = " << r.max_velocity() << (gv_ok ? "  ok" : "  FAIL") << '\n';
  out << "max ODE defect    = " << r.max_defect() << "  (truncation tail, not gated)\n";
  if (auto e = r.max_err_p()) out << "max |p - p_ref|   = " << *e << '\n';
  if (auto e = r.max_err_v()) out << "max |v - v_ref|   = " << *e << '\n';
  if (auto e = r.max_err_lambda()) out << "max |lambda - ref| = " << *e << '\n';
  const bool pass = g_ok && gv_ok;
  out << (pass ? "verify passed" : "verify FAILED") << " (tol " << f.tol << ")\n";
  return pass ? 0 : 1;
}

TimePoly sine_series(int max_degree, int cap, bool cosine) {
  TimePoly s(cap);
  double term = 1.0;
  for (int k = 0; k <= max_degree; ++k) {
    if (k > 0) term /= k;
    if ((k % 2 == 1) != cosine) s.set_coeff(k, ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term);
  }
  return s;
}

int cmd_demo(int order, std::ostream& out) {
  const LoadedSystem loaded = robot::load();
  const SeriesSolution sol = solve_series(loaded.system, order);
  const int cap = sol.history.degree_cap;

  out << "two-link robot, p0 = (0, 0), v0 = (1, -2), order n0 = " << order << "\n\n";
  out << "components:\n";
  for (std::size_t n = 0; n < sol.history.p.size(); ++n) {
    out << "  p^(" << n << ") = (" << format_series(sol.history.p[n][0]) << ", "
        << format_series(sol.history.p[n][1]) << ")";
    if (n < sol.history.lambda.size()) out << "    lambda^(" << n << ") = " << format_series(sol.history.lambda[n][0]);
    out << '\n';
  }

  // Truncated sums next to the Taylor polynomials of the exact motion
  // p = (sin t, -2 sin t), v = (cos t, -2 cos t), lambda = cos t.
  const TimePoly sin_p = sine_series(order - 1, cap, false);
  const TimePoly cos_v = sine_series(order - 2, cap, true);
  const TimePoly cos_l = sine_series(order - 3, cap, true);
  struct Row {
    const char* label;
    TimePoly got;
    TimePoly expected;
  };
  std::vector<Row> rows = {
      {"p1(t)", sol.p[0], sin_p},         {"p2(t)", sol.p[1], -2.0 * sin_p},
      {"v1(t)", sol.v[0], cos_v},         {"v2(t)", sol.v[1], -2.0 * cos_v},
      {"lambda(t)", sol.lambda[0], cos_l},
  };
  // The multiplier sum stops at order n0-3. One further step adds
  // lambda^(n0-2) and brings it to the same degree as v.
  const SeriesSolution next = solve_series(loaded.system, order + 1);
  rows.push_back({"lambda+", next.lambda[0], sine_series(order - 2, next.history.degree_cap, true)});

  out << "\ntruncated series (computed | expected from the exact solution):\n";
  double worst = 0.0;
  for (const auto& row : rows) {
    out << "  " << std::left << std::setw(10) << row.label << " = " << format_series(row.got) << '\n';
    out << "  " << std::setw(10) << "" << "   " << format_series(row.expected) << '\n';
    for (int k = 0; k <= row.got.cap(); ++k)
      worst = std::max(worst, std::abs(row.got.coeff(k) - row.expected.coeff(k)));
  }
  out << "  (lambda+ includes lambda^(" << order - 2 << ") from one extra recursion step)\n";
  out << "\nmax coefficient difference: " << std::scientific << std::setprecision(3) << worst << '\n';
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adomian decomposition solver for index-3 Euler-Lagrange equations", "admdae"};
  app.require_subcommand(1);

  std::string check_config;
  double check_tol = kConsistencyTolerance;
  auto* check = app.add_subcommand("check", "Consistency of initial data and structural diagnostics");
  check->add_option("--config", check_config, "System description (JSON)")->required();
  check->add_option("--tol", check_tol, "Consistency tolerance")->capture_default_str();

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Solve and export sampled p, v, lambda as CSV");
  add_solve_flags(solve, solve_flags);
  solve->add_option("--out", solve_flags.out, "Solution CSV (default: stdout)");

  SolveFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "Solve and gate on constraint residuals");
  add_solve_flags(verify, verify_flags);
  verify->add_option("--out", verify_flags.out, "Also write the solution CSV here");
  verify->add_option("--tol", verify_flags.tol, "Residual threshold")->capture_default_str();
  verify->add_option("--jobs", verify_flags.jobs, "Threads for residual sampling")
      ->capture_default_str()
      ->check(CLI::Range(1u, 256u));

  int demo_order = kDefaultOrder;
  auto* demo = app.add_subcommand("demo", "Solve the built-in two-link robot and print its series");
  demo->add_option("--order", demo_order, "Approximation order n0")->capture_default_str()->check(CLI::Range(3, 30));

  std::vector<const char*> argv{"admdae"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*check) return cmd_check(check_config, check_tol, out);
    if (*solve) return cmd_solve(solve_flags, out);
    if (*verify) return cmd_verify(verify_flags, out);
    if (*demo) return cmd_demo(demo_order, out);
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace admdae
