#include "admdae/config.hpp"

#include <fstream>

#include "admdae/error.hpp"

namespace admdae {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where = "") {
  if (!j.is_object()) throw Error(Errc::config, (where.empty() ? "config" : where) + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(Errc::config, "missing key '" + where + key + "'");
  return *it;
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::config, "key '" + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace

SystemConfig config_from_json(const json& j) {
  SystemConfig c;
  c.name = get_as<std::string>(require(j, "name"), "name");
  c.coordinates = get_as<std::vector<std::string>>(require(j, "coordinates"), "coordinates");
  c.velocities = get_as<std::vector<std::string>>(require(j, "velocities"), "velocities");
  if (auto it = j.find("parameters"); it != j.end())
    c.parameters = get_as<std::map<std::string, double>>(*it, "parameters");
  c.mass_matrix = get_as<std::vector<std::vector<std::string>>>(require(j, "mass_matrix"), "mass_matrix");
  c.force = get_as<std::vector<std::string>>(require(j, "force"), "force");
  c.constraints = get_as<std::vector<std::string>>(require(j, "constraints"), "constraints");
  const json& initial = require(j, "initial");
  c.initial_p = get_as<std::vector<double>>(require(initial, "p", "initial."), "initial.p");
  c.initial_v = get_as<std::vector<double>>(require(initial, "v", "initial."), "initial.v");
  if (auto it = j.find("reference"); it != j.end() && !it->is_null()) {
    ReferenceConfig r;
    if (auto p = it->find("p"); p != it->end()) r.p = get_as<std::vector<std::string>>(*p, "reference.p");
    if (auto v = it->find("v"); v != it->end()) r.v = get_as<std::vector<std::string>>(*v, "reference.v");
    if (auto l = it->find("lambda"); l != it->end())
      r.lambda = get_as<std::vector<std::string>>(*l, "reference.lambda");
    c.reference = std::move(r);
  }
  return c;
}

json config_to_json(const SystemConfig& c) {
  json j;
  j["name"] = c.name;
  j["coordinates"] = c.coordinates;
  j["velocities"] = c.velocities;
  j["parameters"] = c.parameters;
  j["mass_matrix"] = c.mass_matrix;
  j["force"] = c.force;
  j["constraints"] = c.constraints;
  j["initial"] = {{"p", c.initial_p}, {"v", c.initial_v}};
  if (c.reference) j["reference"] = {{"p", c.reference->p}, {"v", c.reference->v}, {"lambda", c.reference->lambda}};
  return j;
}

SystemConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::config, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void write_config(const SystemConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write config '" + path.string() + "'");
  // nlohmann writes doubles in shortest round-trip form.
  out << config_to_json(c).dump(2) << '\n';
  if (!out) throw Error(Errc::io, "failed writing '" + path.string() + "'");
}

namespace {

Expr parse_keyed(const std::string& text, const SymbolTable& symbols, const std::string& key) {
  try {
    return parse_expression(text, symbols);
  } catch (const ParseError& e) {
    throw ParseError(e.code(), e.position(), key + ": " + e.detail());
  }
}

std::vector<Expr> parse_list(const std::vector<std::string>& texts, const SymbolTable& symbols,
                             const std::string& key) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < texts.size(); ++i)
    out.push_back(parse_keyed(texts[i], symbols, key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> evaluate_list(const std::vector<Expr>& es, double t, std::span<const double> params) {
  const Bindings b{{}, {}, params, t};
  std::vector<double> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(evaluate(e, b));
  return out;
}

}  // namespace

std::vector<double> ReferenceSolution::position(double t, std::span<const double> parameters) const {
  return evaluate_list(p, t, parameters);
}

std::vector<double> ReferenceSolution::velocity(double t, std::span<const double> parameters) const {
  return evaluate_list(v, t, parameters);
}

std::vector<double> ReferenceSolution::multiplier(double t, std::span<const double> parameters) const {
  return evaluate_list(lambda, t, parameters);
}

LoadedSystem build_system(const SystemConfig& c) {
  const std::size_t np = c.coordinates.size();
  if (c.velocities.size() != np)
    throw Error(Errc::config, "velocities has " + std::to_string(c.velocities.size()) +
                                  " names, expected " + std::to_string(np));
  if (c.mass_matrix.size() != np)
    throw Error(Errc::config, "mass_matrix has " + std::to_string(c.mass_matrix.size()) +
                                  " rows, expected " + std::to_string(np));
  for (std::size_t i = 0; i < np; ++i)
    if (c.mass_matrix[i].size() != np)
      throw Error(Errc::config, "mass_matrix row " + std::to_string(i) + " has " +
                                    std::to_string(c.mass_matrix[i].size()) + " entries, expected " +
                                    std::to_string(np));
  if (c.force.size() != np)
    throw Error(Errc::config, "force has " + std::to_string(c.force.size()) + " entries, expected " +
                                  std::to_string(np));
  if (c.constraints.size() > np)
    throw Error(Errc::config, "more constraints than coordinates");
  if (c.initial_p.size() != np || c.initial_v.size() != np)
    throw Error(Errc::config, "initial.p and initial.v must have " + std::to_string(np) + " entries");

  std::vector<std::pair<std::string, double>> params(c.parameters.begin(), c.parameters.end());
  SymbolTable symbols(c.coordinates, c.velocities, std::move(params));

  ExprMatrix mass{np, np, {}};
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < np; ++j)
      mass.entries.push_back(parse_keyed(c.mass_matrix[i][j], symbols,
                                         "mass_matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
  std::vector<Expr> force = parse_list(c.force, symbols, "force");
  std::vector<Expr> constraints = parse_list(c.constraints, symbols, "constraints");

  std::optional<ReferenceSolution> reference;
  if (c.reference) {
    // References are functions of time and parameters only.
    const SymbolTable time_only({}, {}, std::vector<std::pair<std::string, double>>(c.parameters.begin(), c.parameters.end()));
    ReferenceSolution r{parse_list(c.reference->p, time_only, "reference.p"),
                        parse_list(c.reference->v, time_only, "reference.v"),
                        parse_list(c.reference->lambda, time_only, "reference.lambda")};
    if (!r.p.empty() && r.p.size() != np) throw Error(Errc::config, "reference.p has the wrong length");
    if (!r.v.empty() && r.v.size() != np) throw Error(Errc::config, "reference.v has the wrong length");
    if (!r.lambda.empty() && r.lambda.size() != c.constraints.size())
      throw Error(Errc::config, "reference.lambda has the wrong length");
    reference = std::move(r);
  }

  return {MechanicalSystem(c.name, std::move(symbols), std::move(mass), std::move(force),
                           std::move(constraints), c.initial_p, c.initial_v),
          std::move(reference)};
}

LoadedSystem load_system(const std::filesystem::path& path) { return build_system(read_config(path)); }

}  // namespace admdae
