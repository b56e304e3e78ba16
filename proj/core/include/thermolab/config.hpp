#pragma once

// Run configuration: JSON file + dotted key=value overrides, validated at
// parse time. Unknown keys are rejected with the offending key in the message.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermolab/resolvent.hpp"

namespace thermolab {

/// Raised for any configuration error; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct Config {
  int n_interior = 100;
  double tau = 1.0;
  double T = 5.0;
  double dt = 1e-3;
  BetaGrid beta_grid;
  double alpha = 1.0;
  int n_max = 20;
  int ensemble = 30;
  std::uint64_t seed = 20240917;
  std::string output_dir = "out";

  std::string kind = "damped_cattaneo";
  std::string subspace = "zero_mean_temperature";  // or "full"
  std::string initial_data = "smooth";             // smooth | zero
  int modes = 8;                                   // smooth data bandwidth
  int trials = 200;
  int intervals = 10;                              // decay certificate samples
  long russell_steps = 10000;
  int eigen_cap = 2000;
  int output_stride = 10;                          // trajectory CSV subsampling
  std::string profile = "full";                    // verify suite: full | quick

  std::map<std::string, double> tolerances;

  double tolerance(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Acceptance tolerances used by the verify suite unless overridden.
const std::map<std::string, double>& default_tolerances();

Config config_from_json(const nlohmann::json& j);

/// Applies "a.b=value" overrides to a JSON tree. Values parse as JSON when
/// possible and fall back to strings.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// Loads (optional) file, applies overrides then the seed, validates.
Config load_config(const std::string& path, const std::vector<std::string>& overrides,
                   const std::optional<std::uint64_t>& seed);

void validate(const Config& cfg);

}  // namespace thermolab
