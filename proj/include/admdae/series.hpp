#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "admdae/expr.hpp"

namespace admdae {

/// Polynomial in time with real coefficients, truncated at a fixed degree cap.
/// Coefficient k multiplies t^k. Storage is dense (cap + 1 entries).
class TimePoly {
 public:
  TimePoly() : TimePoly(0) {}
  explicit TimePoly(int cap);
  TimePoly(std::vector<double> coefficients, int cap);
  TimePoly(std::initializer_list<double> coefficients, int cap)
      : TimePoly(std::vector<double>(coefficients), cap) {}

  static TimePoly constant(double c, int cap) { return monomial(c, 0, cap); }
  static TimePoly monomial(double c, int power, int cap);

  int cap() const noexcept { return static_cast<int>(c_.size()) - 1; }
  std::span<const double> coefficients() const noexcept { return c_; }
  double coeff(int k) const noexcept { return k >= 0 && k <= cap() ? c_[k] : 0.0; }
  void set_coeff(int k, double value);

  /// Highest k with c[k] != 0, or -1 for the zero polynomial.
  int degree() const noexcept;
  /// Like degree(), treating |c[k]| <= tol as zero. For reporting only.
  int effective_degree(double tol = 1e-14) const noexcept;
  bool is_zero() const noexcept { return degree() < 0; }
  bool is_constant() const noexcept { return degree() <= 0; }

  /// Horner evaluation.
  double operator()(double t) const noexcept;

  /// Copy with coefficients above `max_degree` dropped. The cap is unchanged.
  TimePoly truncated(int max_degree) const;

  TimePoly& operator+=(const TimePoly& o);
  TimePoly& operator-=(const TimePoly& o);
  TimePoly& operator*=(double s);

  friend TimePoly operator+(TimePoly a, const TimePoly& b) { return a += b; }
  friend TimePoly operator-(TimePoly a, const TimePoly& b) { return a -= b; }
  friend TimePoly operator*(TimePoly a, double s) { return a *= s; }
  friend TimePoly operator*(double s, TimePoly a) { return a *= s; }
  friend TimePoly operator-(TimePoly a) { return a *= -1.0; }
  friend TimePoly operator*(const TimePoly& a, const TimePoly& b);

  friend bool operator==(const TimePoly&, const TimePoly&) = default;

 private:
  std::vector<double> c_;
};

/// L^{-1}: antiderivative vanishing at t = 0. Throws cap_overflow if the
/// result would not fit under the cap.
TimePoly integrate(const TimePoly& a);
/// L^{-2}
TimePoly integrate_twice(const TimePoly& a);
/// L: coefficient-shift derivative.
TimePoly derivative(const TimePoly& a);
double evaluate(const TimePoly& a, double t);

using PolyVector = std::vector<TimePoly>;

PolyVector operator+(const PolyVector& a, const PolyVector& b);
PolyVector operator-(const PolyVector& a, const PolyVector& b);
PolyVector operator*(double s, const PolyVector& a);
PolyVector zeros(std::size_t n, int cap);
PolyVector integrate_twice(const PolyVector& a);
PolyVector derivative(const PolyVector& a);
PolyVector truncated(const PolyVector& a, int max_degree);
std::vector<double> evaluate(const PolyVector& a, double t);

/// Row-major matrix of time polynomials.
struct PolyMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<TimePoly> entries;

  PolyMatrix() = default;
  PolyMatrix(std::size_t r, std::size_t c, int cap) : rows(r), cols(c), entries(r * c, TimePoly(cap)) {}

  const TimePoly& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  TimePoly& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  PolyMatrix transposed() const;
};

PolyVector operator*(const PolyMatrix& a, const PolyVector& v);

/// Inputs to compose(): per-variable components graded by the expansion
/// parameter of the Adomian decomposition.
///
/// Variable slots: coordinate i -> i, velocity i -> n_coordinates + i. Slots
/// missing from `components` are an error only if the expression uses them.
/// Grade 0 of every supplied variable must be a constant polynomial.
struct GradedSeries {
  int grade_cap = 0;
  int degree_cap = 0;
  std::size_t n_coordinates = 0;
  std::vector<std::vector<TimePoly>> components;  // [slot][grade]
  std::vector<double> parameters;
  /// The time symbol stands for time_origin + local time.
  double time_origin = 0.0;

  std::size_t slot(Symbol s) const;
};

/// Grades 0..grade_cap of e(sum_i eps^i u^(i)). Elementary functions are
/// expanded in Taylor series about the value of their argument at eps = 0,
/// t = 0; time-dependent parts (from the time symbol) are expanded as power
/// series in t. Denominators, log and sqrt need a non-zero (positive) value
/// there.
std::vector<TimePoly> compose(const Expr& e, const GradedSeries& args);

}  // namespace admdae
