#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "admdae/system.hpp"

namespace admdae {

/// Closed-form reference solution, expressions in t and parameters.
struct ReferenceConfig {
  std::vector<std::string> p;
  std::vector<std::string> v;
  std::vector<std::string> lambda;
};

/// On-disk description of a system. Expression strings use the grammar of
/// parse_expression().
struct SystemConfig {
  std::string name;
  std::vector<std::string> coordinates;
  std::vector<std::string> velocities;
  std::map<std::string, double> parameters;
  std::vector<std::vector<std::string>> mass_matrix;
  std::vector<std::string> force;
  std::vector<std::string> constraints;
  std::vector<double> initial_p;
  std::vector<double> initial_v;
  std::optional<ReferenceConfig> reference;
};

SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& c);

SystemConfig read_config(const std::filesystem::path& path);
void write_config(const SystemConfig& c, const std::filesystem::path& path);

struct ReferenceSolution {
  std::vector<Expr> p;
  std::vector<Expr> v;
  std::vector<Expr> lambda;

  std::vector<double> position(double t, std::span<const double> parameters) const;
  std::vector<double> velocity(double t, std::span<const double> parameters) const;
  std::vector<double> multiplier(double t, std::span<const double> parameters) const;
};

struct LoadedSystem {
  MechanicalSystem system;
  std::optional<ReferenceSolution> reference;
};

/// Validates shapes, resolves symbols and builds the Jacobian. Expression
/// errors are reported with the offending config key.
LoadedSystem build_system(const SystemConfig& c);
LoadedSystem load_system(const std::filesystem::path& path);

}  // namespace admdae
