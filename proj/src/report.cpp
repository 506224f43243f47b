#include "admdae/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

#include "admdae/error.hpp"

namespace admdae {

std::vector<double> sample_times(double t0, double t1, std::size_t count) {
  if (count < 2) throw Error(Errc::invalid_argument, "need at least 2 samples");
  if (!(t1 > t0)) throw Error(Errc::invalid_argument, "sample interval is empty");
  std::vector<double> t(count);
  const double step = (t1 - t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = t0 + step * static_cast<double>(i);
  t.back() = t1;
  return t;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::optional<double> max_of(const std::optional<std::vector<double>>& v) {
  if (!v) return std::nullopt;
  return v->empty() ? 0.0 : *std::max_element(v->begin(), v->end());
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

void write_solution_csv(const StagedSolution& sol, std::size_t samples, std::ostream& out) {
  const std::size_t np = sol.stages.front().series.p.size();
  const std::size_t nl = sol.stages.front().series.lambda.size();
  out << 't';
  for (std::size_t i = 0; i < np; ++i) out << ",p" << i + 1;
  for (std::size_t i = 0; i < np; ++i) out << ",v" << i + 1;
  for (std::size_t i = 0; i < nl; ++i) out << ",lambda" << i + 1;
  out << '\n';
  for (double t : sample_times(sol.t_begin(), sol.t_end(), samples)) {
    out << number(t);
    for (double x : sol.position(t)) out << ',' << number(x);
    for (double x : sol.velocity(t)) out << ',' << number(x);
    for (double x : sol.multiplier(t)) out << ',' << number(x);
    out << '\n';
  }
}

void sample_and_export(const StagedSolution& sol, std::size_t samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  write_solution_csv(sol, samples, out);
  if (!out) throw Error(Errc::io, "failed writing '" + path.string() + "'");
}

double ResidualReport::max_position() const { return max_of(position); }
double ResidualReport::max_velocity() const { return max_of(velocity); }
double ResidualReport::max_defect() const { return max_of(defect); }
std::optional<double> ResidualReport::max_err_p() const { return max_of(err_p); }
std::optional<double> ResidualReport::max_err_v() const { return max_of(err_v); }
std::optional<double> ResidualReport::max_err_lambda() const { return max_of(err_lambda); }

ResidualReport residual_report(const MechanicalSystem& sys, const StagedSolution& sol, std::size_t samples,
                               const ReferenceSolution* reference, unsigned jobs) {
  ResidualReport r;
  r.t = sample_times(sol.t_begin(), sol.t_end(), samples);
  const auto params = sys.symbols().parameter_values();
  const std::size_t count = r.t.size();
  r.position.assign(count, 0.0);
  r.velocity.assign(count, 0.0);
  r.defect.assign(count, 0.0);
  if (reference && !reference->p.empty()) r.err_p.emplace(count, 0.0);
  if (reference && !reference->v.empty()) r.err_v.emplace(count, 0.0);
  if (reference && !reference->lambda.empty()) r.err_lambda.emplace(count, 0.0);

  auto fill = [&](std::size_t i) {
    const double t = r.t[i];
    const Stage& stage = sol.stage_at(t);
    const double tau = t - stage.begin;
    const auto p = stage.series.position(tau);
    const auto v = stage.series.velocity(tau);
    const auto lambda = stage.series.multiplier(tau);
    const auto accel = evaluate(derivative(derivative(stage.series.p)), tau);

    const DenseMatrix g = sys.jacobian_at(p);
    const DenseVector vv = Eigen::Map<const DenseVector>(v.data(), static_cast<Eigen::Index>(v.size()));
    const DenseVector av = Eigen::Map<const DenseVector>(accel.data(), static_cast<Eigen::Index>(accel.size()));
    const DenseVector lv = Eigen::Map<const DenseVector>(lambda.data(), static_cast<Eigen::Index>(lambda.size()));

    const DenseVector gres = sys.constraints_at(p);
    const DenseVector gvres = g * vv;
    const DenseVector defect = sys.mass_at(p) * av - sys.force_at(p, v, t) + g.transpose() * lv;
    r.position[i] = max_abs(std::span<const double>(gres.data(), static_cast<std::size_t>(gres.size())));
    r.velocity[i] = max_abs(std::span<const double>(gvres.data(), static_cast<std::size_t>(gvres.size())));
    r.defect[i] = max_abs(std::span<const double>(defect.data(), static_cast<std::size_t>(defect.size())));

    if (r.err_p) (*r.err_p)[i] = max_abs_diff(p, reference->position(t, params));
    if (r.err_v) (*r.err_v)[i] = max_abs_diff(v, reference->velocity(t, params));
    if (r.err_lambda) (*r.err_lambda)[i] = max_abs_diff(lambda, reference->multiplier(t, params));
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fill(i);
    return r;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fill(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return r;
}

void write_residual_csv(const ResidualReport& r, std::ostream& out) {
  out << "t,g_res,gv_res,defect,err_p,err_v,err_lambda\n";
  auto optional_cell = [&](const std::optional<std::vector<double>>& col, std::size_t i) {
    out << ',';
    if (col) out << number((*col)[i]);
  };
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    out << number(r.t[i]) << ',' << number(r.position[i]) << ',' << number(r.velocity[i]) << ','
        << number(r.defect[i]);
    optional_cell(r.err_p, i);
    optional_cell(r.err_v, i);
    optional_cell(r.err_lambda, i);
    out << '\n';
  }
}

void write_residual_csv(const ResidualReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  write_residual_csv(report, out);
  if (!out) throw Error(Errc::io, "failed writing '" + path.string() + "'");
}

namespace {

// Best rational approximation of x >= 0 with denominator below 1e9, if one is
// within 1e-12 relative.
std::optional<std::pair<long long, long long>> as_fraction(double x) {
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = x;
  for (int iter = 0; iter < 40; ++iter) {
    const double a = std::floor(rest);
    if (a > 1e12) break;
    const long long ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0;
    const long long k2 = ai * k1 + k0;
    if (k2 > 1'000'000'000LL) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-12 * std::max(1.0, x))
      return std::make_pair(h1, k1);
    const double frac = rest - a;
    if (frac <= 0.0) break;
    rest = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace

std::string format_series(const TimePoly& p, double zero_tol) {
  std::string out;
  for (int k = 0; k <= p.cap(); ++k) {
    const double c = p.coeff(k);
    if (std::abs(c) <= zero_tol) continue;
    const bool negative = c < 0.0;
    if (out.empty()) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    const std::string power = k == 0 ? "" : (k == 1 ? "t" : "t^" + std::to_string(k));
    if (auto frac = as_fraction(std::abs(c))) {
      const auto [num, den] = *frac;
      std::string term;
      if (k == 0) term = std::to_string(num);
      else if (num == 1) term = power;
      else term = std::to_string(num) + "*" + power;
      if (den != 1) term += "/" + std::to_string(den);
      out += term;
    } else {
      out += number(std::abs(c));
      if (k > 0) out += "*" + power;
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace admdae
