#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "admdae/expr.hpp"
#include "admdae/series.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline bool close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max({1.0, std::abs(a), std::abs(b)}));
}

inline double max_coeff_diff(const admdae::TimePoly& a, const admdae::TimePoly& b) {
  double m = 0.0;
  for (int k = 0; k <= std::max(a.cap(), b.cap()); ++k) m = std::max(m, std::abs(a.coeff(k) - b.coeff(k)));
  return m;
}

inline double max_coeff_diff(const admdae::PolyVector& a, const admdae::PolyVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_coeff_diff(a[i], b[i]));
  return m;
}

inline double max_coeff(const admdae::TimePoly& a) { return max_coeff_diff(a, admdae::TimePoly(a.cap())); }

/// Random polynomial of exact-or-lower degree `degree` with coefficients in [-1, 1].
inline admdae::TimePoly random_poly(Rng& rng, int degree, int cap) {
  admdae::TimePoly p(cap);
  for (int k = 0; k <= degree; ++k) p.set_coeff(k, uniform(rng, -1.0, 1.0));
  return p;
}

/// Random polynomial whose coefficients are small dyadic rationals, so ring
/// identities hold exactly in floating point.
inline admdae::TimePoly dyadic_poly(Rng& rng, int degree, int cap) {
  admdae::TimePoly p(cap);
  for (int k = 0; k <= degree; ++k) p.set_coeff(k, uniform_int(rng, -16, 16) / 8.0);
  return p;
}

/// Random expression over the symbols of `table`. Every generated tree is
/// smooth and defined for all real inputs: log and sqrt only see positive
/// arguments and divisors stay away from zero.
class ExprGenerator {
 public:
  ExprGenerator(const admdae::SymbolTable& table, Rng& rng) : table_(table), rng_(rng) {
    for (const auto& n : table.coordinates()) names_.push_back(n);
    for (const auto& n : table.velocities()) names_.push_back(n);
    for (const auto& n : table.parameter_names()) names_.push_back(n);
    names_.push_back("t");
  }

  std::string text(int depth) {
    if (depth == 0 || uniform_int(rng_, 0, 5) == 0) return leaf();
    const std::string a = text(depth - 1);
    switch (uniform_int(rng_, 0, 10)) {
      case 0: return "(" + a + ")+(" + text(depth - 1) + ")";
      case 1: return "(" + a + ")-(" + text(depth - 1) + ")";
      case 2: return "(" + a + ")*(" + text(depth - 1) + ")";
      case 3: return "(" + a + ")/(2+cos(" + text(depth - 1) + "))";
      case 4: return "(" + a + ")^" + std::to_string(uniform_int(rng_, 0, 3));
      case 5: return "-(" + a + ")";
      case 6: return "sin(" + a + ")";
      case 7: return "cos(" + a + ")";
      case 8: return "exp(sin(" + a + "))";
      case 9: return "log(1+(" + a + ")^2)";
      default: return "sqrt(3+sin(" + a + "))";
    }
  }

  admdae::Expr expr(int depth) { return admdae::parse_expression(text(depth), table_); }

 private:
  std::string leaf() {
    if (uniform_int(rng_, 0, 3) == 0) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", uniform(rng_, 0.1, 2.0));
      return buf;
    }
    return names_[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(names_.size()) - 1))];
  }

  const admdae::SymbolTable& table_;
  Rng& rng_;
  std::vector<std::string> names_;
};

}  // namespace testing
