#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "admdae/error.hpp"
#include "admdae/series.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace admdae;
using testing::closed_form;
using testing::nonlinearities;

namespace {

TimePoly poly(std::initializer_list<double> c, int cap = 8) { return TimePoly(c, cap); }

Errc error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io;
}

const SymbolTable& scalar_table() {
  static const SymbolTable s({"u"}, {"w"}, {{"k", 0.75}});
  return s;
}

GradedSeries scalar_series(std::vector<TimePoly> grades, int cap) {
  GradedSeries g;
  g.grade_cap = static_cast<int>(grades.size()) - 1;
  g.degree_cap = cap;
  g.n_coordinates = 1;
  g.components = {std::move(grades)};
  g.parameters = {0.75};
  return g;
}

}  // namespace

TEST_CASE("polynomial arithmetic examples") {
  CHECK((poly({1, 1}) * poly({1, -1})) == poly({1, 0, -1}));
  const TimePoly t3 = TimePoly::monomial(1.0, 3, 5);
  const TimePoly t4 = TimePoly::monomial(1.0, 4, 5);
  CHECK((t3 * t4).is_zero());
  CHECK(3.0 * poly({0, 0, 0.5}) == poly({0, 0, 1.5}));
  CHECK_THROWS_AS(poly({1}, 3) + poly({1}, 4), Error);
}

TEST_CASE("degree and evaluation") {
  CHECK(TimePoly(5).degree() == -1);
  CHECK(poly({1, 0, 2, 0, 0}).degree() == 2);
  CHECK(poly({1, 0, 1e-16}).effective_degree() == 0);
  CHECK(poly({3}).is_constant());

  const double x = std::numbers::pi / 6.0;
  const TimePoly sin7 = poly({0, 1, 0, -1.0 / 6, 0, 1.0 / 120, 0, -1.0 / 5040});
  CHECK(std::abs(evaluate(sin7, x) - 0.5) <= 2e-6);
  CHECK(evaluate(TimePoly(8), 1.7) == 0.0);
  CHECK(evaluate(poly({1, 0, -0.5, 0, 1.0 / 24, 0, -1.0 / 720}), 0.0) == 1.0);
  CHECK(poly({1, 2, 3})(2.0) == 17.0);
}

TEST_CASE("integral and derivative operators") {
  CHECK(integrate(poly({1})) == poly({0, 1}));
  CHECK(integrate_twice(poly({1})) == poly({0, 0, 0.5}));
  CHECK(integrate_twice(poly({0, 1})) == poly({0, 0, 0, 1.0 / 6}));
  const TimePoly t5 = integrate_twice(TimePoly::monomial(1.0, 3, 8));
  CHECK(t5.coeff(5) == doctest::Approx(1.0 / 20).epsilon(1e-15));
  CHECK(t5.degree() == 5);

  CHECK(derivative(poly({0, 0, 0, -1.0 / 6})) == poly({0, 0, -0.5}));
  CHECK(derivative(poly({4})).is_zero());
  const TimePoly c = poly({1, 0, -0.5});
  CHECK(derivative(derivative(integrate_twice(c))) == c);

  CHECK(error_code([] { integrate(TimePoly::monomial(1.0, 4, 4)); }) == Errc::cap_overflow);
  CHECK(error_code([] { integrate_twice(TimePoly::monomial(1.0, 3, 4)); }) == Errc::cap_overflow);
}

TEST_CASE("property: L inverts L^-1 and L^2 inverts L^-2") {
  testing::Rng rng(11);
  auto within_ulps = [](const TimePoly& a, const TimePoly& b) {
    for (int k = 0; k <= a.cap(); ++k)
      if (std::abs(a.coeff(k) - b.coeff(k)) > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b.coeff(k)))
        return false;
    return true;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const int cap = testing::uniform_int(rng, 2, 12);
    const int degree = testing::uniform_int(rng, 0, cap - 2);
    // Arbitrary doubles: x / n * n can be off by one rounding.
    const TimePoly a = testing::random_poly(rng, degree, cap);
    CHECK(within_ulps(derivative(integrate(a)), a));
    CHECK(within_ulps(derivative(derivative(integrate_twice(a))), a));
    // Coefficients that the integrations divide evenly round-trip exactly.
    TimePoly even(cap);
    for (int k = 0; k <= degree; ++k) even.set_coeff(k, testing::uniform_int(rng, -9, 9) * (k + 1) * (k + 2));
    CHECK(derivative(integrate(even)) == even);
    CHECK(derivative(derivative(integrate_twice(even))) == even);

    TimePoly no_constant = a;
    no_constant.set_coeff(0, 0.0);
    CHECK(within_ulps(integrate(derivative(no_constant)), no_constant));
    TimePoly int_no_constant = even;
    int_no_constant.set_coeff(0, 0.0);
    CHECK(integrate(derivative(int_no_constant)) == int_no_constant);
  }
}

TEST_CASE("property: ring laws hold exactly on dyadic coefficients") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int cap = testing::uniform_int(rng, 0, 10);
    const TimePoly a = testing::dyadic_poly(rng, testing::uniform_int(rng, 0, cap), cap);
    const TimePoly b = testing::dyadic_poly(rng, testing::uniform_int(rng, 0, cap), cap);
    const TimePoly c = testing::dyadic_poly(rng, testing::uniform_int(rng, 0, cap), cap);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a - a == TimePoly(cap));
  }
}

TEST_CASE("compose: closed-form grades of u^2") {
  const Expr e = parse_expression("u^2", scalar_table());
  const TimePoly u0 = poly({1.5}), u1 = poly({0, 2}), u2 = poly({0, 1, -1});
  const auto out = compose(e, scalar_series({u0, u1, u2}, 8));
  REQUIRE(out.size() == 3);
  CHECK(testing::max_coeff_diff(out[1], 2.0 * 1.5 * u1) <= 1e-15);
  CHECK(testing::max_coeff_diff(out[2], 2.0 * 1.5 * u2 + u1 * u1) <= 1e-15);
}

TEST_CASE("compose: robot force grade 1") {
  const SymbolTable s({"p1", "p2"}, {"v1", "v2"});
  const std::vector<Expr> f{parse_expression("(cos(p1)+cos(p1+p2))*v1-3*p1", s),
                            parse_expression("(cos(p1+p2))*v1+(1-(3/2)*cos(p2))*p1", s)};
  GradedSeries g;
  g.grade_cap = 1;
  g.degree_cap = 8;
  g.n_coordinates = 2;
  g.components = {{poly({0}), poly({0, 1})},
                  {poly({0}), poly({0, -2})},
                  {poly({1}), poly({0})},
                  {poly({-2}), poly({0})}};
  const auto f0 = compose(f[0], g);
  const auto f1 = compose(f[1], g);
  CHECK(f0[0] == poly({2}));
  CHECK(f1[0] == poly({1}));
  CHECK(testing::max_coeff_diff(f0[1], poly({0, -3})) <= 1e-15);
  CHECK(testing::max_coeff_diff(f1[1], poly({0, -0.5})) <= 1e-15);
}

TEST_CASE("compose: time and parameters") {
  const Expr e = parse_expression("k*t*u", scalar_table());
  GradedSeries g = scalar_series({poly({2}), poly({0, 1})}, 8);
  g.time_origin = 0.5;
  const auto out = compose(e, g);
  // k (0.5 + t) (2 + eps t)
  CHECK(testing::max_coeff_diff(out[0], poly({0.75, 1.5})) <= 1e-15);
  CHECK(testing::max_coeff_diff(out[1], poly({0, 0.375, 0.75})) <= 1e-15);
}

TEST_CASE("compose: functions of time are power series in t") {
  const int cap = 10;
  GradedSeries g = scalar_series({TimePoly::constant(0.3, cap), TimePoly::monomial(1.0, 1, cap)}, cap);
  g.time_origin = 0.2;
  const SymbolTable& s = scalar_table();
  // Grade 0 of sin(t) and 1/(2+t) are their Taylor polynomials about t = 0.2.
  const auto sin_t = compose(parse_expression("sin(t)", s), g);
  const auto inv = compose(parse_expression("1/(2+t)", s), g);
  const auto mixed = compose(parse_expression("exp(u*t)", s), g);
  double fact = 1.0;
  for (int k = 0; k <= cap; ++k) {
    if (k > 0) fact *= k;
    const double dsin = std::array<double, 4>{std::sin(0.2), std::cos(0.2), -std::sin(0.2), -std::cos(0.2)}[k % 4];
    CHECK(sin_t[0].coeff(k) == doctest::Approx(dsin / fact).epsilon(1e-13));
    CHECK(inv[0].coeff(k) == doctest::Approx((k % 2 ? -1.0 : 1.0) / std::pow(2.2, k + 1)).epsilon(1e-13));
  }
  CHECK(sin_t[1].is_zero());
  // exp(u t) with u = 0.3 + eps t: grade 1 is t (0.2 + t) exp(0.3 (0.2 + t)).
  for (double t : {0.0, 0.1, 0.25}) {
    CHECK(mixed[0](t) == doctest::Approx(std::exp(0.3 * (0.2 + t))).epsilon(1e-9));
    CHECK(mixed[1](t) == doctest::Approx(t * (0.2 + t) * std::exp(0.3 * (0.2 + t))).epsilon(1e-9));
  }
}

TEST_CASE("compose: preconditions") {
  const SymbolTable& s = scalar_table();
  CHECK(error_code([&] { compose(parse_expression("sin(u)", s), scalar_series({poly({0, 1})}, 8)); }) ==
        Errc::non_constant_head);
  CHECK(error_code([&] { compose(parse_expression("1/u", s), scalar_series({poly({0}), poly({0, 1})}, 8)); }) ==
        Errc::zero_head);
  CHECK(error_code([&] { compose(parse_expression("log(u)", s), scalar_series({poly({-1}), poly({0, 1})}, 8)); }) ==
        Errc::non_positive_head);
  CHECK(error_code([&] { compose(parse_expression("sqrt(u)", s), scalar_series({poly({0}), poly({0, 1})}, 8)); }) ==
        Errc::non_positive_head);
  CHECK(error_code([&] { compose(parse_expression("w", s), scalar_series({poly({1})}, 8)); }) ==
        Errc::invalid_argument);
  CHECK(error_code([&] { compose(parse_expression("u", s), scalar_series({poly({1, 1})}, 8)); }) ==
        Errc::non_constant_head);
  CHECK(error_code([&] { compose(parse_expression("u", s), scalar_series({poly({1}, 4)}, 8)); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("property: compose matches the closed forms") {
  testing::Rng rng(2024);
  const int cap = 10;
  for (const auto& nl : nonlinearities()) {
    const Expr e = parse_expression(nl.text, scalar_table());
    for (int draw = 0; draw < 50; ++draw) {
      const double c = testing::uniform(rng, nl.head_lo, nl.head_hi);
      std::vector<TimePoly> grades{TimePoly::constant(c, cap)};
      for (int i = 1; i <= 4; ++i) grades.push_back(testing::random_poly(rng, i, cap));
      const auto out = compose(e, scalar_series(grades, cap));
      for (double t : {-0.9, -0.3, 0.4, 1.0}) {
        double u[5];
        for (int i = 0; i <= 4; ++i) u[i] = grades[i](t);
        for (int n = 0; n <= 4; ++n) {
          const double expected = closed_form(n, u, [&](int m) { return nl.derivative(c, m); });
          INFO(nl.text << " grade " << n << " head " << c << " t " << t);
          CHECK(testing::close(out[n](t), expected, 1e-10));
        }
      }
    }
  }
}

TEST_CASE("property: compose is linear in the expression") {
  testing::Rng rng(31);
  const SymbolTable& s = scalar_table();
  testing::ExprGenerator gen(SymbolTable({"u"}, {"w"}), rng);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string a_text = gen.text(3), b_text = gen.text(3);
    const double a = testing::uniform(rng, -2, 2), b = testing::uniform(rng, -2, 2);
    const Expr e1 = parse_expression(a_text, s), e2 = parse_expression(b_text, s);
    const Expr sum = Expr::make_binary(NodeKind::add, Expr::make_binary(NodeKind::multiply, Expr::constant(a), e1),
                                       Expr::make_binary(NodeKind::multiply, Expr::constant(b), e2));
    GradedSeries g;
    g.grade_cap = 4;
    g.degree_cap = 8;
    g.n_coordinates = 1;
    g.parameters = {0.75};
    for (int slot = 0; slot < 2; ++slot) {
      std::vector<TimePoly> grades{TimePoly::constant(testing::uniform(rng, -1, 1), 8)};
      for (int i = 1; i <= 4; ++i) grades.push_back(testing::random_poly(rng, i, 8));
      g.components.push_back(grades);
    }
    const auto lhs = compose(sum, g);
    const auto r1 = compose(e1, g), r2 = compose(e2, g);
    for (int n = 0; n <= 4; ++n) {
      const TimePoly rhs = a * r1[n] + b * r2[n];
      const double scale = std::max({1.0, testing::max_coeff(rhs), testing::max_coeff(lhs[n])});
      INFO(a_text << " | " << b_text);
      CHECK(testing::max_coeff_diff(lhs[n], rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("property: grade n depends only on grades 0..n") {
  testing::Rng rng(41);
  const SymbolTable& s = scalar_table();
  testing::ExprGenerator gen(SymbolTable({"u"}, {"w"}), rng);
  for (int trial = 0; trial < 100; ++trial) {
    const Expr e = parse_expression(gen.text(4), s);
    GradedSeries g;
    g.grade_cap = 5;
    g.degree_cap = 10;
    g.n_coordinates = 1;
    g.parameters = {0.75};
    for (int slot = 0; slot < 2; ++slot) {
      std::vector<TimePoly> grades{TimePoly::constant(testing::uniform(rng, -1, 1), 10)};
      for (int i = 1; i <= 5; ++i) grades.push_back(testing::random_poly(rng, i, 10));
      g.components.push_back(grades);
    }
    const auto base = compose(e, g);
    const int n = testing::uniform_int(rng, 0, 4);
    GradedSeries perturbed = g;
    for (auto& slot : perturbed.components)
      for (int i = n + 1; i <= 5; ++i) slot[i] = testing::random_poly(rng, i, 10);
    const auto out = compose(e, perturbed);
    for (int j = 0; j <= n; ++j) CHECK(out[j] == base[j]);
  }
}
