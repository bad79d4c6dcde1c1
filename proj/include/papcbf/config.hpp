#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include <papcbf/channel_sim.hpp>

namespace papcbf {

// Invalid or unreadable configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
T read_number(const nlohmann::json& value, const std::string& key) {
  if constexpr (std::is_same_v<T, double>) {
    if (!value.is_number()) {
      throw ConfigError(key + ": expected a number");
    }
    return value.get<double>();
  } else {
    if (!value.is_number_integer()) {
      throw ConfigError(key + ": expected an integer");
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (value.is_number_unsigned()) return value.get<T>();
      const auto v = value.get<std::int64_t>();
      if (v < 0) throw ConfigError(key + ": expected a nonnegative integer");
      return T(v);
    } else {
      const auto v = value.get<std::int64_t>();
      if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) {
        throw ConfigError(key + ": integer out of range");
      }
      return T(v);
    }
  }
}

}  // namespace detail

inline std::vector<Method> parse_methods(const std::vector<std::string>& names,
                                         const std::string& key = "methods") {
  std::vector<Method> out;
  for (const auto& name : names) {
    const auto m = method_from_string(name);
    if (!m) {
      throw ConfigError(key + ": unknown method '" + name + "'");
    }
    out.push_back(*m);
  }
  return out;
}

// Keys must match ScenarioConfig fields; missing keys keep their defaults.
inline ScenarioConfig parse_config_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be a JSON object");
  }
  ScenarioConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "n") cfg.n = detail::read_number<int>(value, key);
    else if (key == "m") cfg.m = detail::read_number<int>(value, key);
    else if (key == "K") cfg.K = detail::read_number<int>(value, key);
    else if (key == "bandwidth_hz") cfg.bandwidth_hz = detail::read_number<double>(value, key);
    else if (key == "fc_hz") cfg.fc_hz = detail::read_number<double>(value, key);
    else if (key == "delay_spread_s") cfg.delay_spread_s = detail::read_number<double>(value, key);
    else if (key == "p_min_w") cfg.p_min_w = detail::read_number<double>(value, key);
    else if (key == "p_max_w") cfg.p_max_w = detail::read_number<double>(value, key);
    else if (key == "noise_floor_dbw") cfg.noise_floor_dbw = detail::read_number<double>(value, key);
    else if (key == "noise_spread_db") cfg.noise_spread_db = detail::read_number<double>(value, key);
    else if (key == "trials") cfg.trials = detail::read_number<int>(value, key);
    else if (key == "cyclic_iters") cfg.cyclic_iters = detail::read_number<int>(value, key);
    else if (key == "dual_iters") cfg.dual_iters = detail::read_number<int>(value, key);
    else if (key == "seed") cfg.seed = detail::read_number<std::uint64_t>(value, key);
    else if (key == "methods") {
      if (!value.is_array()) {
        throw ConfigError("methods: expected an array of method names");
      }
      std::vector<std::string> names;
      for (const auto& item : value) {
        if (!item.is_string()) {
          throw ConfigError("methods: expected an array of method names");
        }
        names.push_back(item.get<std::string>());
      }
      cfg.methods = parse_methods(names);
    } else {
      throw ConfigError(key + ": unknown configuration key");
    }
  }
  return cfg;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config_json(doc);
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot read '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

inline nlohmann::json to_json(const ScenarioConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : cfg.methods) methods.push_back(std::string(to_string(m)));
  return nlohmann::json{
      {"n", cfg.n},
      {"m", cfg.m},
      {"K", cfg.K},
      {"bandwidth_hz", cfg.bandwidth_hz},
      {"fc_hz", cfg.fc_hz},
      {"delay_spread_s", cfg.delay_spread_s},
      {"p_min_w", cfg.p_min_w},
      {"p_max_w", cfg.p_max_w},
      {"noise_floor_dbw", cfg.noise_floor_dbw},
      {"noise_spread_db", cfg.noise_spread_db},
      {"trials", cfg.trials},
      {"cyclic_iters", cfg.cyclic_iters},
      {"dual_iters", cfg.dual_iters},
      {"seed", cfg.seed},
      {"methods", methods},
  };
}

}  // namespace papcbf
