#include "pcap/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pcap/error.hpp"
#include "pcap/geometry.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

const std::set<std::string> kKeys{"body", "n", "p", "q", "tgrid", "mesh", "companion", "tolerances",
                                  "field", "numeric", "out", "formats"};
const std::set<std::string> kFormats{"csv", "json"};

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::vector<QExponent> parse_q_list(const std::string& text) {
  std::vector<QExponent> out;
  for (const auto& item : split(text)) out.push_back(QExponent::parse(item));
  return out;
}

std::vector<std::string> parse_formats(const std::string& text) {
  auto out = split(text);
  for (const auto& f : out) {
    if (!kFormats.count(f)) throw ConfigError("unknown output format '" + f + "' (csv, json)");
  }
  return out;
}

void validate(const RunConfig& cfg) {
  Body::parse(cfg.body);
  const Params params = cfg.params();
  (void)params;
  if (cfg.mesh.r_far < 0.0 || cfg.mesh.target_h < 0.0 || !(cfg.mesh.grading > 0.0)) {
    throw ParameterError("mesh sizes must be positive (0 selects the default)");
  }
  if (!(cfg.monotone_rel >= 0.0) || !(cfg.derivative_rel > 0.0)) {
    throw ParameterError("tolerances must be positive");
  }
  for (const auto& f : cfg.formats) {
    if (!kFormats.count(f)) throw ConfigError("unknown output format '" + f + "' (csv, json)");
  }
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig cfg;
  if (j.contains("body")) cfg.body = get_as<std::string>(j["body"], "body");
  if (j.contains("n")) cfg.n = get_as<int>(j["n"], "n");
  if (j.contains("p")) cfg.p = get_as<double>(j["p"], "p");
  if (j.contains("q")) {
    const auto& q = j["q"];
    cfg.q.clear();
    if (q.is_string()) {
      cfg.q = parse_q_list(q.get<std::string>());
    } else if (q.is_array()) {
      for (const auto& item : q) {
        if (item.is_number()) {
          cfg.q.push_back(QExponent::finite(item.get<double>()));
        } else if (item.is_string()) {
          cfg.q.push_back(QExponent::parse(item.get<std::string>()));
        } else {
          throw ConfigError("q entries must be numbers or \"inf\"");
        }
      }
    } else {
      throw ConfigError("config key 'q' must be a list or a comma-separated string");
    }
  }
  if (j.contains("tgrid")) cfg.tgrid = get_as<std::string>(j["tgrid"], "tgrid");
  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    if (!m.is_object()) throw ConfigError("config key 'mesh' must be an object");
    for (const auto& [key, value] : m.items()) {
      if (key == "r_far") {
        cfg.mesh.r_far = get_as<double>(value, "mesh.r_far");
      } else if (key == "h") {
        cfg.mesh.target_h = get_as<double>(value, "mesh.h");
      } else if (key == "grading") {
        cfg.mesh.grading = get_as<double>(value, "mesh.grading");
      } else {
        throw ConfigError("unknown config key 'mesh." + key + "'");
      }
    }
  }
  if (j.contains("companion")) cfg.companion = get_as<bool>(j["companion"], "companion");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("config key 'tolerances' must be an object");
    for (const auto& [key, value] : t.items()) {
      if (key == "monotone_rel") {
        cfg.monotone_rel = get_as<double>(value, "tolerances.monotone_rel");
      } else if (key == "derivative_rel") {
        cfg.derivative_rel = get_as<double>(value, "tolerances.derivative_rel");
      } else {
        throw ConfigError("unknown config key 'tolerances." + key + "'");
      }
    }
  }
  if (j.contains("field")) cfg.field = get_as<std::string>(j["field"], "field");
  if (j.contains("numeric")) cfg.numeric = get_as<bool>(j["numeric"], "numeric");
  if (j.contains("out")) cfg.out = get_as<std::string>(j["out"], "out");
  if (j.contains("formats")) {
    const auto& f = j["formats"];
    if (f.is_string()) {
      cfg.formats = parse_formats(f.get<std::string>());
    } else {
      cfg.formats = get_as<std::vector<std::string>>(f, "formats");
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& e : cfg.q) {
    if (e.is_infinite()) {
      q.push_back("inf");
    } else {
      q.push_back(e.value());
    }
  }
  return nlohmann::json{{"body", cfg.body},
                        {"n", cfg.n},
                        {"p", cfg.p},
                        {"q", q},
                        {"tgrid", cfg.tgrid},
                        {"mesh", {{"r_far", cfg.mesh.r_far}, {"h", cfg.mesh.target_h}, {"grading", cfg.mesh.grading}}},
                        {"companion", cfg.companion},
                        {"tolerances", {{"monotone_rel", cfg.monotone_rel}, {"derivative_rel", cfg.derivative_rel}}},
                        {"field", cfg.field},
                        {"numeric", cfg.numeric},
                        {"out", cfg.out.string()},
                        {"formats", cfg.formats}};
}

}  // namespace pcap
