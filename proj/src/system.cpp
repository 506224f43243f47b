#include "admdae/system.hpp"

#include "admdae/error.hpp"

namespace admdae {

namespace {

void check_references(const Expr& e, const SymbolTable& symbols, bool allow_velocity_and_time,
                      const std::string& where) {
  for (const Symbol s : free_symbols(e)) {
    bool in_range = true;
    switch (s.kind) {
      case SymbolKind::coordinate:
        in_range = s.index < symbols.dimension();
        break;
      case SymbolKind::velocity:
        in_range = s.index < symbols.dimension();
        if (!allow_velocity_and_time)
          throw Error(Errc::config, where + " may not depend on velocity '" + symbols.name(s) + "'");
        break;
      case SymbolKind::time:
        if (!allow_velocity_and_time) throw Error(Errc::config, where + " may not depend on time");
        break;
      case SymbolKind::parameter:
        in_range = s.index < symbols.parameter_names().size();
        break;
    }
    if (!in_range) throw Error(Errc::unknown_identifier, where + " references an undeclared symbol");
  }
}

}  // namespace

MechanicalSystem::MechanicalSystem(std::string name, SymbolTable symbols, ExprMatrix mass,
                                   std::vector<Expr> force, std::vector<Expr> constraints,
                                   std::vector<double> p0, std::vector<double> v0, double time_origin)
    : name_(std::move(name)),
      symbols_(std::move(symbols)),
      mass_(std::move(mass)),
      force_(std::move(force)),
      constraints_(std::move(constraints)),
      p0_(std::move(p0)),
      v0_(std::move(v0)),
      time_origin_(time_origin) {
  const std::size_t np = symbols_.dimension();
  if (np == 0) throw Error(Errc::config, "system has no coordinates");
  if (mass_.rows != np || mass_.cols != np || mass_.entries.size() != np * np)
    throw Error(Errc::config, "mass matrix must be " + std::to_string(np) + "x" + std::to_string(np));
  if (force_.size() != np)
    throw Error(Errc::config, "force has " + std::to_string(force_.size()) + " entries, expected " +
                                  std::to_string(np));
  if (constraints_.size() > np)
    throw Error(Errc::config, "more constraints than coordinates");
  if (p0_.size() != np || v0_.size() != np)
    throw Error(Errc::config, "initial p and v must have " + std::to_string(np) + " entries");

  for (std::size_t i = 0; i < mass_.entries.size(); ++i)
    check_references(mass_.entries[i], symbols_, false,
                     "mass entry (" + std::to_string(i / np + 1) + "," + std::to_string(i % np + 1) + ")");
  for (std::size_t i = 0; i < np; ++i)
    check_references(force_[i], symbols_, true, "force entry " + std::to_string(i + 1));
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    check_references(constraints_[i], symbols_, false, "constraint " + std::to_string(i + 1));

  std::vector<Symbol> coords;
  for (std::size_t i = 0; i < np; ++i) coords.push_back(SymbolTable::coordinate(i));
  jacobian_ = admdae::jacobian(constraints_, coords);
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    std::vector<Expr> row(jacobian_.entries.begin() + static_cast<std::ptrdiff_t>(j * np),
                          jacobian_.entries.begin() + static_cast<std::ptrdiff_t>((j + 1) * np));
    hessians_.push_back(admdae::jacobian(row, coords));
  }
}

MechanicalSystem MechanicalSystem::with_initial_state(std::vector<double> p0, std::vector<double> v0,
                                                      double time_origin) const {
  MechanicalSystem copy = *this;
  if (p0.size() != p0_.size() || v0.size() != v0_.size())
    throw Error(Errc::dimension_mismatch, "initial state has wrong dimension");
  copy.p0_ = std::move(p0);
  copy.v0_ = std::move(v0);
  copy.time_origin_ = time_origin;
  return copy;
}

Bindings MechanicalSystem::bind(std::span<const double> p, std::span<const double> v, double t) const {
  return Bindings{p, v, symbols_.parameter_values(), t};
}

DenseMatrix MechanicalSystem::evaluate_matrix(const ExprMatrix& m, std::span<const double> p) const {
  const Bindings b = bind(p, {}, 0.0);
  DenseMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = evaluate(m(i, j), b);
  return out;
}

DenseMatrix MechanicalSystem::mass_at(std::span<const double> p) const { return evaluate_matrix(mass_, p); }

DenseMatrix MechanicalSystem::jacobian_at(std::span<const double> p) const {
  return evaluate_matrix(jacobian_, p);
}

DenseMatrix MechanicalSystem::hessian_at(std::size_t constraint, std::span<const double> p) const {
  return evaluate_matrix(hessians_.at(constraint), p);
}

DenseVector MechanicalSystem::force_at(std::span<const double> p, std::span<const double> v, double t) const {
  const Bindings b = bind(p, v, t);
  DenseVector out(force_.size());
  for (std::size_t i = 0; i < force_.size(); ++i) out[i] = evaluate(force_[i], b);
  return out;
}

DenseVector MechanicalSystem::constraints_at(std::span<const double> p) const {
  const Bindings b = bind(p, {}, 0.0);
  DenseVector out(constraints_.size());
  for (std::size_t i = 0; i < constraints_.size(); ++i) out[i] = evaluate(constraints_[i], b);
  return out;
}

}  // namespace admdae
