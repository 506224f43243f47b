#include "admdae/series.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "admdae/error.hpp"

namespace admdae {

namespace {

void require_same_cap(const TimePoly& a, const TimePoly& b) {
  if (a.cap() != b.cap())
    throw Error(Errc::dimension_mismatch, "time polynomials with different degree caps (" +
                                              std::to_string(a.cap()) + " vs " +
                                              std::to_string(b.cap()) + ")");
}

}  // namespace

TimePoly::TimePoly(int cap) {
  if (cap < 0) throw Error(Errc::invalid_argument, "negative degree cap");
  c_.assign(static_cast<std::size_t>(cap) + 1, 0.0);
}

TimePoly::TimePoly(std::vector<double> coefficients, int cap) : TimePoly(cap) {
  const std::size_t n = std::min(coefficients.size(), c_.size());
  for (std::size_t k = 0; k < n; ++k) c_[k] = coefficients[k];
}

TimePoly TimePoly::monomial(double c, int power, int cap) {
  TimePoly p(cap);
  if (power >= 0 && power <= cap) p.c_[power] = c;
  return p;
}

void TimePoly::set_coeff(int k, double value) {
  if (k < 0 || k > cap())
    throw Error(Errc::cap_overflow, "coefficient index " + std::to_string(k) + " exceeds cap " +
                                        std::to_string(cap()));
  c_[k] = value;
}

int TimePoly::degree() const noexcept {
  for (int k = cap(); k >= 0; --k)
    if (c_[k] != 0.0) return k;
  return -1;
}

int TimePoly::effective_degree(double tol) const noexcept {
  for (int k = cap(); k >= 0; --k)
    if (std::abs(c_[k]) > tol) return k;
  return -1;
}

double TimePoly::operator()(double t) const noexcept {
  double acc = 0.0;
  for (int k = cap(); k >= 0; --k) acc = acc * t + c_[k];
  return acc;
}

TimePoly TimePoly::truncated(int max_degree) const {
  TimePoly out = *this;
  for (int k = std::max(max_degree + 1, 0); k <= cap(); ++k) out.c_[k] = 0.0;
  return out;
}

TimePoly& TimePoly::operator+=(const TimePoly& o) {
  require_same_cap(*this, o);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

TimePoly& TimePoly::operator-=(const TimePoly& o) {
  require_same_cap(*this, o);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

TimePoly& TimePoly::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

TimePoly operator*(const TimePoly& a, const TimePoly& b) {
  require_same_cap(a, b);
  const int cap = a.cap();
  const int da = a.degree();
  const int db = b.degree();
  TimePoly out(cap);
  for (int i = 0; i <= da; ++i) {
    if (a.c_[i] == 0.0) continue;
    for (int j = 0; j <= db && i + j <= cap; ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return out;
}

TimePoly integrate(const TimePoly& a) {
  const int d = a.degree();
  if (d + 1 > a.cap())
    throw Error(Errc::cap_overflow, "integration raises degree " + std::to_string(d) +
                                        " beyond cap " + std::to_string(a.cap()));
  TimePoly out(a.cap());
  for (int k = 0; k <= d; ++k) out.set_coeff(k + 1, a.coeff(k) / (k + 1));
  return out;
}

TimePoly integrate_twice(const TimePoly& a) { return integrate(integrate(a)); }

TimePoly derivative(const TimePoly& a) {
  TimePoly out(a.cap());
  for (int k = 1; k <= a.cap(); ++k) out.set_coeff(k - 1, a.coeff(k) * k);
  return out;
}

double evaluate(const TimePoly& a, double t) { return a(t); }

// ---------------------------------------------------------------------------
// Vectors and matrices of polynomials

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(Errc::dimension_mismatch,
                "size mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace

PolyVector operator+(const PolyVector& a, const PolyVector& b) {
  require_same_size(a.size(), b.size());
  PolyVector out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
  return out;
}

PolyVector operator-(const PolyVector& a, const PolyVector& b) {
  require_same_size(a.size(), b.size());
  PolyVector out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
  return out;
}

PolyVector operator*(double s, const PolyVector& a) {
  PolyVector out = a;
  for (auto& p : out) p *= s;
  return out;
}

PolyVector zeros(std::size_t n, int cap) { return PolyVector(n, TimePoly(cap)); }

PolyVector integrate_twice(const PolyVector& a) {
  PolyVector out;
  out.reserve(a.size());
  for (const auto& p : a) out.push_back(integrate_twice(p));
  return out;
}

PolyVector derivative(const PolyVector& a) {
  PolyVector out;
  out.reserve(a.size());
  for (const auto& p : a) out.push_back(derivative(p));
  return out;
}

PolyVector truncated(const PolyVector& a, int max_degree) {
  PolyVector out;
  out.reserve(a.size());
  for (const auto& p : a) out.push_back(p.truncated(max_degree));
  return out;
}

std::vector<double> evaluate(const PolyVector& a, double t) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& p : a) out.push_back(p(t));
  return out;
}

PolyMatrix PolyMatrix::transposed() const {
  PolyMatrix out;
  out.rows = cols;
  out.cols = rows;
  out.entries.resize(entries.size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(j, i) = (*this)(i, j);
  return out;
}

PolyVector operator*(const PolyMatrix& a, const PolyVector& v) {
  require_same_size(a.cols, v.size());
  if (a.rows == 0) return {};
  const int cap = v.empty() ? a.entries.front().cap() : v.front().cap();
  PolyVector out = zeros(a.rows, cap);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out[i] += a(i, j) * v[j];
  return out;
}

// ---------------------------------------------------------------------------
// Graded composition

std::size_t GradedSeries::slot(Symbol s) const {
  switch (s.kind) {
    case SymbolKind::coordinate: return s.index;
    case SymbolKind::velocity: return n_coordinates + s.index;
    default: throw Error(Errc::invalid_argument, "symbol has no graded slot");
  }
}

namespace {

// Grades 0..K of one scalar quantity.
using Graded = std::vector<TimePoly>;

class Composer {
 public:
  explicit Composer(const GradedSeries& args) : args_(args), K_(args.grade_cap), cap_(args.degree_cap) {
    for (const auto& grades : args_.components) {
      if (!grades.empty() && !grades.front().is_constant())
        throw Error(Errc::non_constant_head, "grade 0 of a graded argument is not constant");
      for (const auto& g : grades)
        if (g.cap() != cap_) throw Error(Errc::dimension_mismatch, "graded argument has wrong degree cap");
    }
  }

  Graded eval(const Expr& e) const {
    switch (e.kind()) {
      case NodeKind::constant: return constant(e.value());
      case NodeKind::variable: return variable(e.symbol());
      case NodeKind::negate: {
        Graded a = eval(e.lhs());
        for (auto& g : a) g *= -1.0;
        return a;
      }
      case NodeKind::add: {
        Graded a = eval(e.lhs());
        const Graded b = eval(e.rhs());
        for (int n = 0; n <= K_; ++n) a[n] += b[n];
        return a;
      }
      case NodeKind::subtract: {
        Graded a = eval(e.lhs());
        const Graded b = eval(e.rhs());
        for (int n = 0; n <= K_; ++n) a[n] -= b[n];
        return a;
      }
      case NodeKind::multiply: return multiply(eval(e.lhs()), eval(e.rhs()));
      case NodeKind::divide: return divide(eval(e.lhs()), eval(e.rhs()));
      case NodeKind::power: {
        const Graded base = eval(e.lhs());
        Graded acc = constant(1.0);
        for (int k = 0; k < e.exponent(); ++k) acc = multiply(acc, base);
        return acc;
      }
      case NodeKind::function: return function(e.function(), eval(e.lhs()));
    }
    return constant(0.0);
  }

 private:
  Graded zero() const { return Graded(static_cast<std::size_t>(K_) + 1, TimePoly(cap_)); }

  Graded constant(double c) const {
    Graded g = zero();
    g[0] = TimePoly::constant(c, cap_);
    return g;
  }

  Graded variable(Symbol s) const {
    if (s.kind == SymbolKind::parameter) {
      if (s.index >= args_.parameters.size())
        throw Error(Errc::invalid_argument, "parameter " + std::to_string(s.index) + " has no value");
      return constant(args_.parameters[s.index]);
    }
    if (s.kind == SymbolKind::time) {
      Graded g = zero();
      g[0] = TimePoly({args_.time_origin, 1.0}, cap_);
      return g;
    }
    const std::size_t slot = args_.slot(s);
    if (slot >= args_.components.size())
      throw Error(Errc::invalid_argument, "no graded components for variable slot " + std::to_string(slot));
    const auto& grades = args_.components[slot];
    Graded g = zero();
    for (int n = 0; n <= K_ && n < static_cast<int>(grades.size()); ++n) g[n] = grades[n];
    return g;
  }

  // Cauchy product in the grading parameter, summed in increasing i.
  Graded multiply(const Graded& a, const Graded& b) const {
    Graded out = zero();
    for (int n = 0; n <= K_; ++n)
      for (int i = 0; i <= n; ++i) {
        if (a[i].is_zero() || b[n - i].is_zero()) continue;
        out[n] += a[i] * b[n - i];
      }
    return out;
  }

  // Quotient recurrence in the grading parameter; b[0] may vary in time as
  // long as its value at t = 0 is non-zero.
  Graded divide(const Graded& a, const Graded& b) const {
    if (b[0].coeff(0) == 0.0) throw Error(Errc::zero_head, "denominator head is zero");
    Graded q = zero();
    for (int n = 0; n <= K_; ++n) {
      TimePoly acc = a[n];
      for (int j = 1; j <= n; ++j) acc -= b[j] * q[n - j];
      q[n] = time_divide(acc, b[0]);
    }
    return q;
  }

  // Truncated power-series quotient num / den in t.
  TimePoly time_divide(const TimePoly& num, const TimePoly& den) const {
    const double d0 = den.coeff(0);
    if (den.is_constant()) return num * (1.0 / d0);
    TimePoly q(cap_);
    for (int k = 0; k <= cap_; ++k) {
      double acc = num.coeff(k);
      for (int j = 1; j <= k; ++j) acc -= den.coeff(j) * q.coeff(k - j);
      q.set_coeff(k, acc / d0);
    }
    return q;
  }

  // F(c + h) = sum_m F^(m)(c)/m! h^m with c the value of grade 0 at t = 0.
  // When grade 0 depends on time its remainder joins h; having no constant
  // term, it makes h^m vanish below degree m, so the sum stops at K + cap.
  Graded function(Function f, const Graded& u) const {
    const double c = u[0].coeff(0);
    Graded h = u;
    h[0].set_coeff(0, 0.0);
    const int terms = h[0].is_zero() ? K_ : K_ + cap_;
    const std::vector<double> taylor = taylor_coefficients(f, c, terms);

    Graded out = constant(taylor[0]);
    Graded hm = constant(1.0);
    for (int m = 1; m <= terms; ++m) {
      hm = multiply(hm, h);
      bool any = false;
      for (int n = 0; n <= K_; ++n)
        if (!hm[n].is_zero()) {
          out[n] += hm[n] * taylor[m];
          any = true;
        }
      if (!any) break;
    }
    return out;
  }

  std::vector<double> taylor_coefficients(Function f, double c, int terms) const {
    std::vector<double> a(static_cast<std::size_t>(terms) + 1, 0.0);
    switch (f) {
      case Function::sin:
      case Function::cos: {
        const double s = std::sin(c);
        const double co = std::cos(c);
        // derivative cycle of sin: sin, cos, -sin, -cos
        const double sin_cycle[4] = {s, co, -s, -co};
        const double cos_cycle[4] = {co, -s, -co, s};
        double inv_fact = 1.0;
        for (int m = 0; m <= terms; ++m) {
          if (m > 0) inv_fact /= m;
          a[m] = (f == Function::sin ? sin_cycle[m % 4] : cos_cycle[m % 4]) * inv_fact;
        }
        break;
      }
      case Function::exp: {
        const double e = std::exp(c);
        double inv_fact = 1.0;
        for (int m = 0; m <= terms; ++m) {
          if (m > 0) inv_fact /= m;
          a[m] = e * inv_fact;
        }
        break;
      }
      case Function::log: {
        if (!(c > 0.0)) throw Error(Errc::non_positive_head, "log of a non-positive head");
        a[0] = std::log(c);
        double inv_pow = 1.0;
        for (int m = 1; m <= terms; ++m) {
          inv_pow /= c;
          a[m] = ((m % 2 == 1) ? 1.0 : -1.0) * inv_pow / m;
        }
        break;
      }
      case Function::sqrt: {
        if (!(c > 0.0)) throw Error(Errc::non_positive_head, "sqrt of a non-positive head");
        // binomial(1/2, m) c^(1/2 - m)
        double coef = std::sqrt(c);
        a[0] = coef;
        for (int m = 1; m <= terms; ++m) {
          coef *= (0.5 - (m - 1)) / m / c;
          a[m] = coef;
        }
        break;
      }
    }
    return a;
  }

  const GradedSeries& args_;
  int K_;
  int cap_;
};

}  // namespace

std::vector<TimePoly> compose(const Expr& e, const GradedSeries& args) {
  if (args.grade_cap < 0) throw Error(Errc::invalid_argument, "negative grade cap");
  return Composer(args).eval(e);
}

}  // namespace admdae
