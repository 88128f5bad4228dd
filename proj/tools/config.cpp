#include "config.hpp"

#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace driftlab::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

const Config::Value& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config field: " + key);
  return it->second;
}

std::string Config::str(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::String)
    throw ConfigError("config field " + key + " must be a string");
  return v.s;
}

std::string Config::str_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double Config::number(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::Number)
    throw ConfigError("config field " + key + " must be a number");
  return v.n;
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Config::integer_or(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key);
  const long r = static_cast<long>(v);
  if (static_cast<double>(r) != v)
    throw ConfigError("config field " + key + " must be an integer");
  return r;
}

bool Config::bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = get(key);
  if (v.kind != Value::Kind::Bool)
    throw ConfigError("config field " + key + " must be a boolean");
  return v.b;
}

std::vector<double> Config::numbers_or(const std::string& key,
                                       const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const Value& v = get(key);
  if (v.kind == Value::Kind::Number) return {v.n};
  if (v.kind != Value::Kind::NumberArray)
    throw ConfigError("config field " + key + " must be a numeric array");
  return v.arr;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_)
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  return out;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text, path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.raw_ = text;

  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    // JSON object, flattened to dotted keys
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw ConfigError(origin + ": JSON parse error: " + e.what());
    }
    std::function<void(const nlohmann::json&, const std::string&)> walk =
        [&](const nlohmann::json& node, const std::string& prefix) {
          for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            const auto& v = it.value();
            Value out;
            if (v.is_object()) {
              walk(v, key);
              continue;
            } else if (v.is_string()) {
              out.kind = Value::Kind::String;
              out.s = v.get<std::string>();
            } else if (v.is_boolean()) {
              out.kind = Value::Kind::Bool;
              out.b = v.get<bool>();
            } else if (v.is_number()) {
              out.kind = Value::Kind::Number;
              out.n = v.get<double>();
            } else if (v.is_array()) {
              if (!v.empty() && v.front().is_string()) {
                out.kind = Value::Kind::StringArray;
                for (const auto& e : v) out.sarr.push_back(e.get<std::string>());
              } else {
                out.kind = Value::Kind::NumberArray;
                for (const auto& e : v) out.arr.push_back(e.get<double>());
              }
            } else {
              throw ConfigError(origin + ": unsupported JSON value at " + key);
            }
            cfg.values_[key] = std::move(out);
          }
        };
    walk(j, "");
    return cfg;
  }

  // TOML subset
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed table header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty table name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string valstr = trim(line.substr(eq + 1));
    if (key.empty() || valstr.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    const std::string full = section.empty() ? key : section + "." + key;

    Value v;
    if (valstr.front() == '"') {
      if (valstr.size() < 2 || valstr.back() != '"')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated string");
      v.kind = Value::Kind::String;
      v.s = valstr.substr(1, valstr.size() - 2);
    } else if (valstr == "true" || valstr == "false") {
      v.kind = Value::Kind::Bool;
      v.b = valstr == "true";
    } else if (valstr.front() == '[') {
      if (valstr.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated array");
      const std::string inner = valstr.substr(1, valstr.size() - 2);
      std::stringstream ss(inner);
      std::string item;
      bool strings = inner.find('"') != std::string::npos;
      v.kind = strings ? Value::Kind::StringArray : Value::Kind::NumberArray;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (strings) {
          if (item.size() < 2 || item.front() != '"' || item.back() != '"')
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": malformed string array element");
          v.sarr.push_back(item.substr(1, item.size() - 2));
        } else {
          double num;
          if (!parse_number(item, num))
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": malformed numeric array element '" + item + "'");
          v.arr.push_back(num);
        }
      }
    } else {
      double num;
      if (!parse_number(valstr, num))
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": cannot parse value '" +
                          valstr + "' for key " + full);
      v.kind = Value::Kind::Number;
      v.n = num;
    }
    cfg.values_[full] = std::move(v);
  }
  return cfg;
}

}  // namespace driftlab::cli
