#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcap/mesh.hpp"
#include "pcap/params.hpp"

namespace pcap {

/// Everything a run depends on. Serialized into the manifest; parsing the
/// serialized form gives back the same config.
struct RunConfig {
  std::string body = "ball:1";
  int n = 3;
  double p = 2.0;
  std::vector<QExponent> q{QExponent::finite(2.0)};
  std::string tgrid = "auto";
  MeshOptions mesh;
  /// Solve a companion field with twice the mesh spacing for error estimates.
  bool companion = true;
  double monotone_rel = 5e-3;
  double derivative_rel = 0.05;
  /// Field artifact to load instead of solving; empty means solve.
  std::string field;
  bool numeric = false;  // identities: add samples from the field
  std::filesystem::path out = "out";
  std::vector<std::string> formats{"csv", "json"};

  Params params() const { return Params(n, p); }
  bool wants(const std::string& format) const;
};

/// Throws ConfigError on unknown keys or wrong types, ParameterError on
/// invalid values (1 < p < n, q >= 1, positive mesh sizes).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);
void validate(const RunConfig& cfg);

/// "1.5,2,inf"
std::vector<QExponent> parse_q_list(const std::string& text);
std::vector<std::string> parse_formats(const std::string& text);

}  // namespace pcap
