#include "parafrac/config_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parafrac {

using nlohmann::json;

namespace {

MapConfig map_from_json(const json& j) {
  MapConfig mc;
  mc.kind = j.at("kind").get<std::string>();
  if (mc.kind == "affine") {
    mc.a = j.at("a").get<double>();
    mc.b = j.at("b").get<double>();
  } else if (mc.kind == "mp_left" || mc.kind == "mp_right") {
    mc.alpha = j.at("alpha").get<double>();
  } else if (mc.kind == "sqrt") {
    // no parameters
  } else {
    throw std::invalid_argument("unknown map kind '" + mc.kind + "'");
  }
  if (j.contains("parabolic_point")) {
    mc.parabolic_point = j.at("parabolic_point").get<double>();
  }
  return mc;
}

json map_to_json(const MapConfig& mc) {
  json j;
  j["kind"] = mc.kind;
  if (mc.kind == "affine") {
    j["a"] = mc.a;
    j["b"] = mc.b;
  } else if (mc.kind == "mp_left" || mc.kind == "mp_right") {
    j["alpha"] = mc.alpha;
  }
  if (mc.parabolic_point) j["parabolic_point"] = *mc.parabolic_point;
  return j;
}

}  // namespace

SystemConfig config_from_json(const json& j) {
  SystemConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  if (cfg.kind == "cantor") {
    for (const auto& m : j.at("maps")) cfg.maps.push_back(map_from_json(m));
  } else if (cfg.kind == "carpet") {
    for (const auto& c : j.at("components")) {
      ComponentConfig cc;
      cc.f = map_from_json(c.at("f"));
      cc.g = map_from_json(c.at("g"));
      cc.col = c.at("col").get<int>();
      cc.row = c.at("row").get<int>();
      cfg.components.push_back(cc);
    }
  } else {
    throw std::invalid_argument("config kind must be 'cantor' or 'carpet'");
  }

  const auto& jm = j.at("measure");
  if (jm.contains("bernoulli")) {
    cfg.measure.bernoulli = jm.at("bernoulli").get<std::vector<double>>();
  } else if (jm.contains("table")) {
    cfg.measure.table_path = jm.at("table").get<std::string>();
  } else {
    throw std::invalid_argument("measure must give 'bernoulli' weights or a 'table' path");
  }
  if (jm.contains("c")) cfg.measure.declared_c = jm.at("c").get<double>();

  if (j.contains("budgets")) {
    const auto& jb = j.at("budgets");
    if (jb.contains("enumeration")) cfg.budgets.enumeration = jb.at("enumeration").get<std::size_t>();
    if (jb.contains("depth_cap")) cfg.budgets.depth_cap = jb.at("depth_cap").get<int>();
    if (jb.contains("tol")) cfg.budgets.tol = jb.at("tol").get<double>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json config_to_json(const SystemConfig& cfg) {
  json j;
  j["kind"] = cfg.kind;
  if (cfg.kind == "cantor") {
    json maps = json::array();
    for (const auto& m : cfg.maps) maps.push_back(map_to_json(m));
    j["maps"] = maps;
  } else {
    json comps = json::array();
    for (const auto& c : cfg.components) {
      json jc;
      jc["f"] = map_to_json(c.f);
      jc["g"] = map_to_json(c.g);
      jc["col"] = c.col;
      jc["row"] = c.row;
      comps.push_back(jc);
    }
    j["components"] = comps;
  }
  json jm;
  if (cfg.measure.bernoulli) jm["bernoulli"] = *cfg.measure.bernoulli;
  if (cfg.measure.table_path) jm["table"] = *cfg.measure.table_path;
  if (cfg.measure.declared_c) jm["c"] = *cfg.measure.declared_c;
  j["measure"] = jm;
  j["budgets"] = {{"enumeration", cfg.budgets.enumeration},
                  {"depth_cap", cfg.budgets.depth_cap},
                  {"tol", cfg.budgets.tol}};
  j["seed"] = cfg.seed;
  return j;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  SystemConfig cfg = config_from_json(j);
  const auto slash = path.find_last_of("/\\");
  cfg.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);
  return cfg;
}

ContractionMap build_map(const MapConfig& mc) {
  ContractionMap m = [&] {
    if (mc.kind == "affine") return ContractionMap::affine(mc.a, mc.b);
    if (mc.kind == "mp_left") return ContractionMap::mp_left(mc.alpha);
    if (mc.kind == "mp_right") return ContractionMap::mp_right(mc.alpha);
    if (mc.kind == "sqrt") return ContractionMap::sqrt_map();
    throw std::invalid_argument("unknown map kind '" + mc.kind + "'");
  }();
  if (mc.parabolic_point) {
    if (!m.parabolic_point() ||
        std::abs(*m.parabolic_point() - *mc.parabolic_point) > 1e-12) {
      throw std::invalid_argument(
          "declared parabolic_point does not match the map kind '" + mc.kind + "'");
    }
  }
  return m;
}

CantorSystem build_cantor(const SystemConfig& cfg) {
  if (cfg.kind != "cantor") throw std::invalid_argument("config is not a cantor system");
  std::vector<ContractionMap> maps;
  for (const auto& mc : cfg.maps) maps.push_back(build_map(mc));
  return CantorSystem(std::move(maps));
}

CarpetSystem build_carpet(const SystemConfig& cfg) {
  if (cfg.kind != "carpet") throw std::invalid_argument("config is not a carpet system");
  std::vector<CarpetComponent> comps;
  for (const auto& cc : cfg.components) {
    comps.push_back({build_map(cc.f), build_map(cc.g), cc.col, cc.row});
  }
  return CarpetSystem(std::move(comps));
}

std::vector<std::pair<Word, double>> load_mass_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mass table " + path);
  std::vector<std::pair<Word, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'word,mass'");
    }
    const std::string word = line.substr(0, comma);
    if (word == "word") continue;  // header row
    rows.emplace_back(word_from_string(word), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

SymbolicMeasure build_measure(const SystemConfig& cfg) {
  const std::size_t arity = cfg.is_carpet() ? cfg.components.size() : cfg.maps.size();
  if (cfg.measure.bernoulli) {
    return SymbolicMeasure::bernoulli(BernoulliWeights(*cfg.measure.bernoulli),
                                      cfg.measure.declared_c);
  }
  std::string path = *cfg.measure.table_path;
  if (!path.empty() && path[0] != '/' && !cfg.base_dir.empty()) {
    path = cfg.base_dir + "/" + path;
  }
  return SymbolicMeasure::table(arity, load_mass_table(path), cfg.measure.declared_c);
}

}  // namespace parafrac
