#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parafrac/measure.hpp"
#include "parafrac/system.hpp"

namespace parafrac {

struct MapConfig {
  std::string kind;  // affine | mp_left | mp_right | sqrt
  double a = 0.0;    // affine slope
  double b = 0.0;    // affine offset
  double alpha = 0.5;
  std::optional<double> parabolic_point;

  bool operator==(const MapConfig&) const = default;
};

struct ComponentConfig {
  MapConfig f, g;
  int col = 0, row = 0;

  bool operator==(const ComponentConfig&) const = default;
};

struct MeasureConfig {
  std::optional<std::vector<double>> bernoulli;
  std::optional<std::string> table_path;  // CSV: word,mass
  std::optional<double> declared_c;

  bool operator==(const MeasureConfig&) const = default;
};

struct BudgetConfig {
  std::size_t enumeration = 20'000'000;
  int depth_cap = 5000;
  double tol = 1e-9;

  bool operator==(const BudgetConfig&) const = default;
};

struct SystemConfig {
  std::string kind;                        // cantor | carpet
  std::vector<MapConfig> maps;             // cantor systems
  std::vector<ComponentConfig> components; // carpet systems
  MeasureConfig measure;
  BudgetConfig budgets;
  std::uint64_t seed = 0;
  std::string base_dir;  // directory of the config file, for table paths

  bool is_carpet() const { return kind == "carpet"; }
};

SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::string& path);

ContractionMap build_map(const MapConfig& mc);
CantorSystem build_cantor(const SystemConfig& cfg);
CarpetSystem build_carpet(const SystemConfig& cfg);
SymbolicMeasure build_measure(const SystemConfig& cfg);

/// Parses a word,mass CSV (one row per cylinder, symbols as digit characters).
std::vector<std::pair<Word, double>> load_mass_table(const std::string& path);

}  // namespace parafrac
