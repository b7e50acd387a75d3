#pragma once

// Flat JSON experiment configuration with per-experiment key schemas.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "revanneal/errors.hpp"

namespace revanneal::harness {

using json = nlohmann::json;

struct KeySpec {
  std::string key;
  json default_value;  // null means "unset" and accepts a number
};

using Schema = std::vector<KeySpec>;

class Config {
 public:
  Config(std::string experiment, Schema schema) : experiment_(std::move(experiment)), schema_(std::move(schema)) {
    resolved_ = json::object();
    for (const auto& spec : schema_) resolved_[spec.key] = spec.default_value;
  }

  const std::string& experiment() const { return experiment_; }
  const json& resolved() const { return resolved_; }

  /// Merges a flat JSON object; the "experiment" key must match if present.
  void merge(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "experiment") {
        if (!value.is_string() || value.get<std::string>() != experiment_) {
          throw ConfigError("config key 'experiment' does not match the requested experiment " + experiment_);
        }
        continue;
      }
      set(key, value);
    }
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    merge(doc);
  }

  /// Applies "key=value"; the value is parsed as JSON, falling back to a string.
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    set(key, value);
  }

  void set(const std::string& key, const json& value) {
    const KeySpec* spec = find(key);
    if (!spec) throw ConfigError("unknown config key '" + key + "' for experiment " + experiment_);
    if (value.is_object()) throw ConfigError("config key '" + key + "' must not be a nested object");
    check_type(*spec, value);
    resolved_[key] = value;
  }

  bool is_set(const std::string& key) const { return !at(key).is_null(); }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
  }

  long long integer(const std::string& key) const {
    const json& v = at(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    }
    throw ConfigError("config key '" + key + "' must be an integer");
  }

  std::string string(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError("config key '" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("config key '" + key + "' must be a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    for (double d : numbers(key)) {
      if (d != static_cast<double>(static_cast<int>(d))) {
        throw ConfigError("config key '" + key + "' must be a list of integers");
      }
      out.push_back(static_cast<int>(d));
    }
    return out;
  }

 private:
  const KeySpec* find(const std::string& key) const {
    for (const auto& spec : schema_) {
      if (spec.key == key) return &spec;
    }
    return nullptr;
  }

  const json& at(const std::string& key) const {
    if (!find(key)) throw ConfigError("unknown config key '" + key + "' for experiment " + experiment_);
    return resolved_.at(key);
  }

  static void check_type(const KeySpec& spec, const json& value) {
    const json& d = spec.default_value;
    const auto bad = [&] { throw ConfigError("config key '" + spec.key + "' has the wrong type: " + value.dump()); };
    if (d.is_null()) {
      if (!value.is_null() && !value.is_number()) bad();
    } else if (d.is_number()) {
      if (!value.is_number()) bad();
    } else if (d.is_string()) {
      if (!value.is_string()) bad();
    } else if (d.is_boolean()) {
      if (!value.is_boolean()) bad();
    } else if (d.is_array()) {
      if (value.is_number()) return;
      if (!value.is_array()) bad();
      for (const auto& x : value) {
        if (!x.is_number()) bad();
      }
    }
  }

  std::string experiment_;
  Schema schema_;
  json resolved_;
};

}  // namespace revanneal::harness
