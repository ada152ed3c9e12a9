#include "hybridrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hybridrl {

ConfigValue ConfigValue::of_bool(bool v) {
  ConfigValue c;
  c.type = Type::kBool;
  c.b = v;
  return c;
}
ConfigValue ConfigValue::of_int(std::int64_t v) {
  ConfigValue c;
  c.type = Type::kInt;
  c.i = v;
  return c;
}
ConfigValue ConfigValue::of_float(double v) {
  ConfigValue c;
  c.type = Type::kFloat;
  c.f = v;
  return c;
}
ConfigValue ConfigValue::of_string(std::string v) {
  ConfigValue c;
  c.type = Type::kString;
  c.s = std::move(v);
  return c;
}
ConfigValue ConfigValue::of_array(std::vector<ConfigValue> v) {
  ConfigValue c;
  c.type = Type::kArray;
  c.items = std::move(v);
  return c;
}

bool ConfigValue::as_bool() const {
  if (type != Type::kBool) throw std::invalid_argument("config value is not a boolean");
  return b;
}
std::int64_t ConfigValue::as_int() const {
  if (type != Type::kInt) throw std::invalid_argument("config value is not an integer");
  return i;
}
double ConfigValue::as_double() const {
  if (type == Type::kFloat) return f;
  if (type == Type::kInt) return static_cast<double>(i);
  throw std::invalid_argument("config value is not numeric");
}
const std::string& ConfigValue::as_string() const {
  if (type != Type::kString) throw std::invalid_argument("config value is not a string");
  return s;
}
std::vector<std::string> ConfigValue::as_string_array() const {
  if (type == Type::kString) return {s};
  if (type != Type::kArray) throw std::invalid_argument("config value is not an array");
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& v : items) out.push_back(v.as_string());
  return out;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const ConfigValue* ConfigDoc::find(const std::string& section, const std::string& key) const {
  const auto sit = sections.find(section);
  if (sit == sections.end()) return nullptr;
  const auto kit = sit->second.find(key);
  return kit == sit->second.end() ? nullptr : &kit->second;
}

std::int64_t ConfigDoc::get_int(const std::string& section, const std::string& key,
                                std::int64_t fallback) const {
  const ConfigValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_int();
}
double ConfigDoc::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  const ConfigValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_double();
}
bool ConfigDoc::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  const ConfigValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_bool();
}
std::string ConfigDoc::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const ConfigValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_string();
}
std::vector<std::string> ConfigDoc::get_string_array(const std::string& section,
                                                     const std::string& key) const {
  const ConfigValue* v = find(section, key);
  return v == nullptr ? std::vector<std::string>{} : v->as_string_array();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a # comment that sits outside of any quoted string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

ConfigValue parse_scalar(const std::string& raw, int line_no) {
  const std::string text = trim(raw);
  if (text.empty())
    throw std::invalid_argument("empty value on line " + std::to_string(line_no));
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw std::invalid_argument("unterminated string on line " + std::to_string(line_no));
    return ConfigValue::of_string(text.substr(1, text.size() - 2));
  }
  if (text == "true") return ConfigValue::of_bool(true);
  if (text == "false") return ConfigValue::of_bool(false);
  const bool looks_float = text.find_first_of(".eE") != std::string::npos &&
                           text.find_first_not_of("+-0123456789.eE") == std::string::npos;
  try {
    std::size_t used = 0;
    if (looks_float) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return ConfigValue::of_float(v);
    } else {
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return ConfigValue::of_int(v);
      const double f = std::stod(text, &used);
      if (used == text.size()) return ConfigValue::of_float(f);
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("cannot parse value '" + text + "' on line " +
                              std::to_string(line_no));
}

ConfigValue parse_value(const std::string& raw, int line_no) {
  const std::string text = trim(raw);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']')
      throw std::invalid_argument("unterminated array on line " + std::to_string(line_no));
    std::vector<ConfigValue> items;
    std::string body = text.substr(1, text.size() - 2);
    std::string current;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!trim(current).empty()) items.push_back(parse_scalar(current, line_no));
        current.clear();
      } else {
        current += c;
      }
    }
    if (!trim(current).empty()) items.push_back(parse_scalar(current, line_no));
    return ConfigValue::of_array(std::move(items));
  }
  return parse_scalar(text, line_no);
}

}  // namespace

ConfigDoc parse_toml(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(strip_comment(line));
    if (stripped.empty()) continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw std::invalid_argument("bad section header on line " + std::to_string(line_no));
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty() || section.find('.') != std::string::npos)
        throw std::invalid_argument("unsupported section name on line " +
                                    std::to_string(line_no));
      doc.sections[section];
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key = value on line " + std::to_string(line_no));
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty() || key.find('.') != std::string::npos)
      throw std::invalid_argument("unsupported key on line " + std::to_string(line_no));
    doc.sections[section][key] = parse_value(stripped.substr(eq + 1), line_no);
  }
  return doc;
}

namespace {

ConfigValue from_json_value(const nlohmann::json& j) {
  if (j.is_boolean()) return ConfigValue::of_bool(j.get<bool>());
  if (j.is_number_integer() || j.is_number_unsigned())
    return ConfigValue::of_int(j.get<std::int64_t>());
  if (j.is_number_float()) return ConfigValue::of_float(j.get<double>());
  if (j.is_string()) return ConfigValue::of_string(j.get<std::string>());
  if (j.is_array()) {
    std::vector<ConfigValue> items;
    for (const auto& v : j) items.push_back(from_json_value(v));
    return ConfigValue::of_array(std::move(items));
  }
  throw std::invalid_argument("unsupported JSON value in config");
}

nlohmann::json to_json_value(const ConfigValue& v) {
  switch (v.type) {
    case ConfigValue::Type::kBool: return v.b;
    case ConfigValue::Type::kInt: return v.i;
    case ConfigValue::Type::kFloat: return v.f;
    case ConfigValue::Type::kString: return v.s;
    case ConfigValue::Type::kArray: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : v.items) arr.push_back(to_json_value(item));
      return arr;
    }
  }
  return nullptr;
}

}  // namespace

ConfigDoc parse_json_config(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config JSON must be an object");
  ConfigDoc doc;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) doc.sections[key][k2] = from_json_value(v2);
      doc.sections[key];
    } else {
      doc.sections[""][key] = from_json_value(value);
    }
  }
  return doc;
}

ConfigDoc load_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return parse_json_config(text);
  return parse_toml(text);
}

std::string config_to_json_text(const ConfigDoc& doc) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, entries] : doc.sections) {
    if (section.empty()) {
      for (const auto& [k, v] : entries) j[k] = to_json_value(v);
    } else {
      nlohmann::json s = nlohmann::json::object();
      for (const auto& [k, v] : entries) s[k] = to_json_value(v);
      j[section] = std::move(s);
    }
  }
  return j.dump(2);
}

}  // namespace hybridrl
