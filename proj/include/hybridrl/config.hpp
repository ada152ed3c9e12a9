#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hybridrl {

// Configuration value as read from a TOML or JSON document.
struct ConfigValue {
  enum class Type { kBool, kInt, kFloat, kString, kArray };

  Type type = Type::kInt;
  bool b = false;
  std::int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::vector<ConfigValue> items;

  static ConfigValue of_bool(bool v);
  static ConfigValue of_int(std::int64_t v);
  static ConfigValue of_float(double v);
  static ConfigValue of_string(std::string v);
  static ConfigValue of_array(std::vector<ConfigValue> v);

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;  // accepts int or float
  const std::string& as_string() const;
  std::vector<std::string> as_string_array() const;
};

using ConfigSection = std::map<std::string, ConfigValue>;

// Sectioned key/value document; top-level keys live in the "" section.
struct ConfigDoc {
  std::map<std::string, ConfigSection> sections;

  bool has(const std::string& section, const std::string& key) const;
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::vector<std::string> get_string_array(const std::string& section,
                                            const std::string& key) const;
};

// TOML subset: [section] headers, key = value pairs, strings, integers,
// floats, booleans, flat arrays, and # comments. Dotted keys and nested
// tables are not part of the schema and are rejected.
ConfigDoc parse_toml(const std::string& text);

// The same schema encoded as a JSON object; nested objects become sections.
ConfigDoc parse_json_config(const std::string& text);

// Dispatches on the file extension (.toml vs .json).
ConfigDoc load_config_file(const std::string& path);

// Round-trip with nlohmann JSON text, used for the manifest config echo.
std::string config_to_json_text(const ConfigDoc& doc);

}  // namespace hybridrl
