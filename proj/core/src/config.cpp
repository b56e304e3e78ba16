#include "thermolab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "thermolab/dynamics.hpp"
#include "thermolab/errors.hpp"
#include "thermolab/operators.hpp"

namespace thermolab {

using nlohmann::json;

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol{
      {"dissipation_identity", 1e-12},
      {"adjoint_identity", 1e-12},
      {"energy_balance", 1e-6},
      {"energy_balance_order", 1.9},
      {"roundoff_floor", 1e-10},
      {"conservation_drift", 1e-10},
      {"discrete_energy_law", 1e-10},
      {"splitting", 1e-6},
      {"splitting_order", 1.9},
      {"inegdub_upper", 4.004},
      {"inegdub_stability", 1e-3},
      {"spectral_order_min", 1.7},
      {"spectral_order_max", 2.3},
      {"eigen_residual", 1e-8},
      {"fourier_exponent_max", 2.3},
      {"implication_eps", 0.3},
      {"implication_eps_prime", 0.3},
      {"resolvent_lower_bound", 1e-6},
      {"ingham_doubling", 0.2},
      {"russell_residual", 1e-12},
      {"fractional_metric", 1e-12},
      {"weak_constant", 1e-10},
  };
  return tol;
}

double Config::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  const auto& d = default_tolerances();
  if (auto it = d.find(name); it != d.end()) return it->second;
  throw ConfigError("tolerances." + name, "unknown tolerance '" + name + "'");
}

json Config::to_json() const {
  json tol = json::object();
  for (const auto& [k, v] : tolerances) tol[k] = v;
  return json{{"n_interior", n_interior},
              {"tau", tau},
              {"T", T},
              {"dt", dt},
              {"beta_grid",
               {{"min", beta_grid.min},
                {"max", beta_grid.max},
                {"points", beta_grid.points},
                {"log", beta_grid.log_spaced},
                {"both_signs", beta_grid.both_signs}}},
              {"alpha", alpha},
              {"n_max", n_max},
              {"ensemble", ensemble},
              {"seed", seed},
              {"output_dir", output_dir},
              {"kind", kind},
              {"subspace", subspace},
              {"initial_data", initial_data},
              {"modes", modes},
              {"trials", trials},
              {"intervals", intervals},
              {"russell_steps", russell_steps},
              {"eigen_cap", eigen_cap},
              {"output_stride", output_stride},
              {"profile", profile},
              {"tolerances", tol}};
}

namespace {

template <class T>
T read(const json& j, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) throw ConfigError(key, "config key '" + key + "' must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!j.is_number_integer()) throw ConfigError(key, "config key '" + key + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0) {
          throw ConfigError(key, "config key '" + key + "' must be nonnegative");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!j.is_number()) throw ConfigError(key, "config key '" + key + "' must be a number");
    } else {
      if (!j.is_string()) throw ConfigError(key, "config key '" + key + "' must be a string");
    }
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, "config key '" + key + "': " + e.what());
  }
}

void require(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError(key, "invalid config key '" + key + "': " + msg);
}

}  // namespace

Config config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config root must be a JSON object");
  Config c;
  for (const auto& [key, v] : j.items()) {
    if (key == "n_interior") c.n_interior = read<int>(v, key);
    else if (key == "tau") c.tau = read<double>(v, key);
    else if (key == "T") c.T = read<double>(v, key);
    else if (key == "dt") c.dt = read<double>(v, key);
    else if (key == "alpha") c.alpha = read<double>(v, key);
    else if (key == "n_max") c.n_max = read<int>(v, key);
    else if (key == "ensemble") c.ensemble = read<int>(v, key);
    else if (key == "seed") c.seed = read<std::uint64_t>(v, key);
    else if (key == "output_dir") c.output_dir = read<std::string>(v, key);
    else if (key == "kind") c.kind = read<std::string>(v, key);
    else if (key == "subspace") c.subspace = read<std::string>(v, key);
    else if (key == "initial_data") c.initial_data = read<std::string>(v, key);
    else if (key == "modes") c.modes = read<int>(v, key);
    else if (key == "trials") c.trials = read<int>(v, key);
    else if (key == "intervals") c.intervals = read<int>(v, key);
    else if (key == "russell_steps") c.russell_steps = read<long>(v, key);
    else if (key == "eigen_cap") c.eigen_cap = read<int>(v, key);
    else if (key == "output_stride") c.output_stride = read<int>(v, key);
    else if (key == "profile") c.profile = read<std::string>(v, key);
    else if (key == "beta_grid") {
      if (!v.is_object()) throw ConfigError(key, "config key 'beta_grid' must be an object");
      for (const auto& [sub, w] : v.items()) {
        const std::string full = "beta_grid." + sub;
        if (sub == "min") c.beta_grid.min = read<double>(w, full);
        else if (sub == "max") c.beta_grid.max = read<double>(w, full);
        else if (sub == "points") c.beta_grid.points = read<int>(w, full);
        else if (sub == "log") c.beta_grid.log_spaced = read<bool>(w, full);
        else if (sub == "both_signs") c.beta_grid.both_signs = read<bool>(w, full);
        else throw ConfigError(full, "unknown config key '" + full + "'");
      }
    } else if (key == "tolerances") {
      if (!v.is_object()) throw ConfigError(key, "config key 'tolerances' must be an object");
      for (const auto& [sub, w] : v.items()) {
        const std::string full = "tolerances." + sub;
        if (!default_tolerances().count(sub)) throw ConfigError(full, "unknown config key '" + full + "'");
        c.tolerances[sub] = read<double>(w, full);
      }
    } else {
      throw ConfigError(key, "unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

void validate(const Config& c) {
  require(c.n_interior >= 2 && c.n_interior <= 2000, "n_interior", "must lie in [2, 2000]");
  require(c.tau > 0.0 && std::isfinite(c.tau), "tau", "must be > 0");
  require(c.dt > 0.0 && std::isfinite(c.dt), "dt", "must be > 0");
  require(c.T > 0.0 && std::isfinite(c.T), "T", "must be > 0");
  try {
    step_count(c.T, c.dt);
  } catch (const InvalidArgument& e) {
    throw ConfigError("T", std::string("invalid config key 'T': ") + e.what());
  }
  try {
    c.beta_grid.values();
  } catch (const InvalidArgument& e) {
    throw ConfigError("beta_grid", std::string("invalid config key 'beta_grid': ") + e.what());
  }
  require(c.alpha >= 0.0 && std::isfinite(c.alpha), "alpha", "must be >= 0");
  require(c.n_max >= 1, "n_max", "must be >= 1");
  require(c.ensemble >= 0, "ensemble", "must be >= 0");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  try {
    generator_kind_from_string(c.kind);
  } catch (const InvalidArgument& e) {
    throw ConfigError("kind", std::string("invalid config key 'kind': ") + e.what());
  }
  require(c.subspace == "full" || c.subspace == "zero_mean_temperature", "subspace",
          "must be 'full' or 'zero_mean_temperature'");
  require(c.initial_data == "smooth" || c.initial_data == "zero", "initial_data", "must be 'smooth' or 'zero'");
  require(c.modes >= 1 && c.modes <= c.n_interior, "modes", "must lie in [1, n_interior]");
  require(c.trials >= 1, "trials", "must be >= 1");
  require(c.intervals >= 2, "intervals", "must be >= 2");
  require(c.russell_steps >= 1, "russell_steps", "must be >= 1");
  require(c.eigen_cap >= 1, "eigen_cap", "must be >= 1");
  require(c.output_stride >= 1, "output_stride", "must be >= 1");
  require(c.profile == "full" || c.profile == "quick", "profile", "must be 'full' or 'quick'");
  for (const auto& [k, v] : c.tolerances) {
    require(default_tolerances().count(k) > 0, "tolerances." + k, "unknown tolerance");
    require(v > 0.0 && std::isfinite(v), "tolerances." + k, "must be > 0");
  }
}

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &tree;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError(key, "override key '" + key + "' is malformed");
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError(key, "override key '" + key + "' descends into a non-object");
    node = &next;
  }
  if (parts.empty() || parts.back().empty()) throw ConfigError(key, "override key '" + key + "' is malformed");
  (*node)[parts.back()] = value;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides,
                   const std::optional<std::uint64_t>& seed) {
  json tree = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
    tree = json::parse(in, nullptr, false);
    if (tree.is_discarded()) throw ConfigError("config", "config file '" + path + "' is not valid JSON");
  }
  for (const auto& o : overrides) apply_override(tree, o);
  if (seed) tree["seed"] = *seed;
  return config_from_json(tree);
}

}  // namespace thermolab
