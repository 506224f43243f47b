#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "admdae/config.hpp"
#include "admdae/error.hpp"
#include "admdae/robot.hpp"
#include "admdae/solver.hpp"
#include "random_system.hpp"
#include "support.hpp"

using namespace admdae;

namespace {

MechanicalSystem robot_system() { return robot::load().system; }

MechanicalSystem robot_with(std::vector<double> p0, std::vector<double> v0) {
  SystemConfig c = robot::config();
  c.initial_p = std::move(p0);
  c.initial_v = std::move(v0);
  c.reference.reset();
  return build_system(c).system;
}

// (1, -2) * c t^k
PolyVector along_kernel(double c, int k, int cap) {
  return {TimePoly::monomial(c, k, cap), TimePoly::monomial(-2.0 * c, k, cap)};
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double max_abs(const PolyVector& v) {
  double m = 0.0;
  for (const auto& p : v) m = std::max(m, testing::max_coeff(p));
  return m;
}

}  // namespace

TEST_CASE("robot components at order 8") {
  const SeriesSolution sol = solve_series(robot_system(), 8);
  const auto& h = sol.history;
  const int cap = h.degree_cap;
  REQUIRE(h.p.size() == 8);
  REQUIRE(h.v.size() == 7);
  REQUIRE(h.lambda.size() == 6);

  // p^(n) = (-1)^((n-1)/2) t^n / n! (1, -2) for odd n, zero for even n >= 2
  for (int n = 0; n < 8; ++n) {
    const PolyVector expected = n % 2 == 1 ? along_kernel(((n / 2) % 2 == 0 ? 1.0 : -1.0) / factorial(n), n, cap)
                                           : zeros(2, cap);
    CHECK(testing::max_coeff_diff(h.p[static_cast<std::size_t>(n)], expected) <= 1e-12);
  }
  // v^(0) = v0, v^(n-1) = L p^(n)
  CHECK(testing::max_coeff_diff(h.v[0], along_kernel(1.0, 0, cap)) <= 1e-12);
  for (std::size_t n = 1; n < h.v.size(); ++n)
    CHECK(testing::max_coeff_diff(h.v[n], derivative(h.p[n + 1])) <= 1e-12);

  // lambda^(n) = (-1)^(n/2) t^n / n! for even n, zero for odd n
  for (int n = 0; n < 6; ++n) {
    TimePoly expected(cap);
    if (n % 2 == 0) expected.set_coeff(n, ((n / 2) % 2 == 0 ? 1.0 : -1.0) / factorial(n));
    CHECK(testing::max_coeff_diff(h.lambda[static_cast<std::size_t>(n)][0], expected) <= 1e-12);
  }
}

TEST_CASE("robot truncated sums") {
  const SeriesSolution sol = solve_series(robot_system(), 8);
  const int cap = sol.history.degree_cap;
  TimePoly sin_t(cap), cos_t(cap), lam(cap);
  for (int k = 0; k <= 7; ++k) {
    const double s = ((k / 2) % 2 == 0 ? 1.0 : -1.0) / factorial(k);
    if (k % 2 == 1) sin_t.set_coeff(k, s);
    else if (k <= 6) cos_t.set_coeff(k, s);
    if (k % 2 == 0 && k <= 4) lam.set_coeff(k, s);
  }
  CHECK(testing::max_coeff_diff(sol.p, PolyVector{sin_t, -2.0 * sin_t}) <= 1e-12);
  CHECK(testing::max_coeff_diff(sol.v, PolyVector{cos_t, -2.0 * cos_t}) <= 1e-12);
  CHECK(testing::max_coeff_diff(sol.lambda, PolyVector{lam}) <= 1e-12);

  // One more order brings the multiplier to degree 6.
  const SeriesSolution next = solve_series(robot_system(), 9);
  TimePoly lam6(next.history.degree_cap);
  lam6.set_coeff(0, 1.0);
  lam6.set_coeff(2, -0.5);
  lam6.set_coeff(4, 1.0 / 24.0);
  lam6.set_coeff(6, -1.0 / 720.0);
  CHECK(testing::max_coeff_diff(next.lambda, PolyVector{lam6}) <= 1e-12);
}

TEST_CASE("robot residuals and structure") {
  const SeriesSolution sol = solve_series(robot_system(), 8);
  CHECK(sol.balance_residual <= 1e-10);
  CHECK(sol.constraint_residual <= 1e-10);
  CHECK(sol.structure.ok());
  REQUIRE(sol.structure.kernel_min_eigenvalue.has_value());
  CHECK(*sol.structure.kernel_min_eigenvalue == doctest::Approx(0.4));
  REQUIRE(sol.z.size() == 5);
  CHECK(max_abs(sol.z[0]) <= 1e-15);
  CHECK(testing::max_coeff_diff(sol.z[1], PolyVector{TimePoly::monomial(-1, 1, 8), TimePoly::monomial(2, 1, 8)}) <=
        1e-12);

  const StructuralResiduals r = structural_residuals(robot_system(), sol);
  CHECK(r.constraint_series <= 1e-9);
  CHECK(r.ode_defect <= 1e-9);
}

TEST_CASE("order bounds") {
  CHECK_THROWS_AS(solve_series(robot_system(), 2), Error);
  const SeriesSolution three = solve_series(robot_system(), 3);
  CHECK(three.history.p.size() == 3);
  CHECK(three.history.lambda.size() == 1);
  CHECK(three.lambda[0].coeff(0) == doctest::Approx(1.0));
}

TEST_CASE("consistency examples") {
  const ConsistencyReport ok = check_consistency(robot_system());
  CHECK(ok.position_residual == 0.0);
  CHECK(ok.velocity_residual == 0.0);
  CHECK(ok.passed());

  const ConsistencyReport bad_v = check_consistency(robot_with({0, 0}, {1, -1}));
  CHECK(bad_v.position_residual == 0.0);
  CHECK(bad_v.velocity_residual == doctest::Approx(1.0));
  CHECK_FALSE(bad_v.passed());

  // g(0.1, 0) = 2 sin 0.1
  const ConsistencyReport bad_p = check_consistency(robot_with({0.1, 0}, {1, -2}));
  CHECK(bad_p.position_residual == doctest::Approx(2.0 * std::sin(0.1)).epsilon(1e-14));
  CHECK(bad_p.position_residual == doctest::Approx(0.1997).epsilon(1e-3));
}

TEST_CASE("inconsistent data is refused with its own error code") {
  for (const auto& [p0, v0] : std::vector<std::pair<std::vector<double>, std::vector<double>>>{
           {{0, 0}, {1, -1}}, {{0.1, 0}, {1, -2}}, {{0, 0}, {1, -2 + 1e-9}}}) {
    try {
      solve_series(robot_with(p0, v0), 8);
      FAIL("inconsistent data accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::inconsistent_initial_data);
    }
  }
  // Below the threshold the data is accepted.
  CHECK_NOTHROW(solve_series(robot_with({0, 0}, {1, -2 + 1e-12}), 8));
}

TEST_CASE("structural failures are refused") {
  SystemConfig c = robot::config();
  c.reference.reset();

  SUBCASE("rank-deficient constraint Jacobian") {
    c.constraints = {"l1*sin(p1)+l2*sin(p1+p2)", "2*(l1*sin(p1)+l2*sin(p1+p2))"};
    try {
      solve_series(build_system(c).system, 8);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::rank_deficient);
    }
  }
  SUBCASE("indefinite on the kernel") {
    c.mass_matrix = {{"1", "0"}, {"0", "-1"}};
    c.constraints = {"p1"};
    c.initial_v = {0, 1};
    try {
      solve_series(build_system(c).system, 8);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::indefinite_on_kernel);
    }
  }
  SUBCASE("singular mass") {
    c.mass_matrix = {{"1", "0"}, {"0", "0"}};
    c.constraints = {"p2"};
    c.initial_v = {1, 0};
    try {
      solve_series(build_system(c).system, 8);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::singular_mass_matrix);
    }
  }
}

TEST_CASE("multistage with one stage equals the plain solve") {
  const MechanicalSystem sys = robot_system();
  const StagedSolution one = multistage_solve(sys, 1.0, 1.0);
  const StagedSolution longer = multistage_solve(sys, 1.0, 5.0);
  const SeriesSolution plain = solve_series(sys, kDefaultOrder);
  for (const auto* s : {&one, &longer}) {
    REQUIRE(s->stages.size() == 1);
    for (std::size_t i = 0; i < 2; ++i)
      for (int k = 0; k <= plain.history.degree_cap; ++k) {
        CHECK(s->stages[0].series.p[i].coeff(k) == plain.p[i].coeff(k));
        CHECK(s->stages[0].series.v[i].coeff(k) == plain.v[i].coeff(k));
      }
    CHECK(s->stages[0].series.lambda[0].coeff(2) == plain.lambda[0].coeff(2));
  }
}

TEST_CASE("multistage restarts on [0, 2]") {
  const MechanicalSystem sys = robot_system();
  const StagedSolution sol = multistage_solve(sys, 2.0, 0.5);
  REQUIRE(sol.stages.size() == 4);
  CHECK(sol.t_begin() == 0.0);
  CHECK(sol.t_end() == 2.0);
  for (std::size_t i = 1; i < sol.stages.size(); ++i) {
    const Stage& s = sol.stages[i];
    CHECK(s.begin == doctest::Approx(0.5 * static_cast<double>(i)));
    CHECK(s.before_projection.position_residual <= 1e-7);
    CHECK(s.before_projection.velocity_residual <= 1e-6);
    CHECK(s.after_projection.passed());
    CHECK(s.projection_iterations <= kProjectionMaxIterations);
  }
  double err_p = 0.0, g_res = 0.0, gv_res = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = 2.0 * i / 200.0;
    const auto p = sol.position(t);
    const auto v = sol.velocity(t);
    err_p = std::max({err_p, std::abs(p[0] - std::sin(t)), std::abs(p[1] + 2.0 * std::sin(t))});
    g_res = std::max(g_res, std::abs(sys.constraints_at(p)(0)));
    gv_res = std::max(gv_res, std::abs((sys.jacobian_at(p) * Eigen::Map<const DenseVector>(v.data(), 2))(0)));
  }
  CHECK(err_p <= 1e-5);
  CHECK(g_res <= 1e-6);
  CHECK(gv_res <= 1e-5);

  const StagedSolution short_run = multistage_solve(sys, 0.5, 0.25);
  REQUIRE(short_run.stages.size() == 2);
  CHECK(short_run.stages[1].before_projection.position_residual <= 1e-7);
  CHECK(short_run.stages[1].before_projection.velocity_residual <= 1e-7);
}

TEST_CASE("projection onto the constraint manifold") {
  const MechanicalSystem sys = robot_system();
  const std::vector<double> p_hat{0.3, -0.55};
  const std::vector<double> v_hat{1.0, -1.7};
  const ProjectedState s = project_consistent(sys, p_hat, v_hat);
  CHECK(std::abs(sys.constraints_at(s.p)(0)) <= 1e-12);
  const DenseMatrix g = sys.jacobian_at(s.p);
  const DenseVector v = Eigen::Map<const DenseVector>(s.v.data(), 2);
  CHECK(std::abs((g * v)(0)) <= 1e-12);
  // p - p_hat is normal to the manifold
  const DenseVector dp = Eigen::Map<const DenseVector>(s.p.data(), 2) - Eigen::Map<const DenseVector>(p_hat.data(), 2);
  CHECK(std::abs(dp(0) * g(0, 1) - dp(1) * g(0, 0)) <= 1e-12);
  // v - v_hat is M-orthogonal to Ker G
  const DenseMatrix m = sys.mass_at(s.p);
  const DenseVector kernel_dir = (DenseVector(2) << g(0, 1), -g(0, 0)).finished();
  const DenseVector dv = v - Eigen::Map<const DenseVector>(v_hat.data(), 2);
  CHECK(std::abs(kernel_dir.dot(m * dv)) <= 1e-12);

  // Consistent data is left alone.
  const ProjectedState same = project_consistent(sys, std::vector<double>{0, 0}, std::vector<double>{1, -2});
  CHECK(same.p == std::vector<double>{0, 0});
  CHECK(same.v[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(same.v[1] == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("default stage length") {
  CHECK(default_stage_length(robot_system(), 10.0) == doctest::Approx(0.25));
  CHECK(default_stage_length(robot_system(), 0.1) == doctest::Approx(0.1));
}

TEST_CASE("property: random systems match the assembled block solve") {
  testing::Rng rng(424242);
  for (int trial = 0; trial < 30; ++trial) {
    const testing::RandomSystem rs = testing::random_system(rng);
    const MechanicalSystem sys = rs.build();
    const SeriesSolution sol = solve_series(sys, 9);
    const auto cmp = testing::compare_with_assembled(rs, sol, 8);
    for (const auto& c : cmp) {
      CHECK(c.p <= 1e-9);
      CHECK(c.lambda <= 1e-9);
    }
    CHECK(sol.balance_residual <= 1e-10);
    CHECK(sol.constraint_residual <= 1e-10);
    const StructuralResiduals r = structural_residuals(sys, sol);
    CHECK(r.constraint_series <= 1e-9);
    CHECK(r.ode_defect <= 1e-9);
  }
}

TEST_CASE("property: degree bounds and initial embedding") {
  testing::Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    // An explicit t in the forces sits at grade 0 and lifts the degrees, so
    // the bound is checked on autonomous forces.
    const testing::RandomSystem rs = testing::random_system(rng, 4, false);
    const int order = testing::uniform_int(rng, 3, 10);
    const SeriesSolution sol = solve_series(rs.build(), order);
    const auto& h = sol.history;
    for (std::size_t n = 0; n < h.p.size(); ++n)
      for (const auto& c : h.p[n]) CHECK(c.degree() <= static_cast<int>(n));
    for (std::size_t n = 0; n < h.lambda.size(); ++n)
      for (const auto& c : h.lambda[n]) CHECK(c.degree() <= static_cast<int>(n));
    for (int i = 0; i < rs.np; ++i) {
      CHECK(sol.p[static_cast<std::size_t>(i)].coeff(0) == rs.p0[static_cast<std::size_t>(i)]);
      CHECK(sol.v[static_cast<std::size_t>(i)].coeff(0) == rs.v0[static_cast<std::size_t>(i)]);
    }
  }
  const MechanicalSystem shifted = robot_system().with_initial_state({0, 0}, {1, -2}, 3.0);
  const StagedSolution s = single_stage(shifted, 0.5);
  CHECK(s.t_begin() == 3.0);
  CHECK(s.position(3.0) == std::vector<double>{0, 0});
  CHECK(s.velocity(3.0) == std::vector<double>{1, -2});
}
