#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftlab::cli {

// Config parse/validation failure; message names the offending field/line.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Experiment configs flattened to dotted keys ("train.batch" -> value).
// Accepts a TOML subset ([section] tables, key = value with strings, numbers,
// booleans, flat arrays, # comments) or a JSON object; the format is picked
// by the first non-space byte.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer_or(const std::string& key, long fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  std::vector<double> numbers_or(const std::string& key,
                                 const std::vector<double>& fallback) const;

  // keys actually present, for validation diagnostics
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  const std::string& raw_text() const { return raw_; }

 private:
  struct Value {
    enum class Kind { String, Number, Bool, NumberArray, StringArray } kind;
    std::string s;
    double n = 0.0;
    bool b = false;
    std::vector<double> arr;
    std::vector<std::string> sarr;
  };
  std::map<std::string, Value> values_;
  std::string raw_;

  const Value& get(const std::string& key) const;
};

}  // namespace driftlab::cli
