#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace glthermo::cli {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// key = value lines grouped under [section] headers.  Keys before the first
// header belong to "common".  Lines starting with # or ; are comments.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  const std::map<std::string, std::string>* section(const std::string& name) const;
};

ConfigFile parse_config(std::istream& in, const std::string& origin);
ConfigFile load_config(const std::string& path);
// Contents of configs/default.ini compiled into the binary.
const char* builtin_default_config();

class Params {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set_default(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void erase(const std::string& key) { values_.erase(key); }

  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> nums(const std::string& key) const;
  std::vector<int> ints(const std::string& key) const;

  // Values with numbers rewritten in shortest round-trip form, so that
  // "0.50" and "0.5" give the same cache key.
  std::map<std::string, std::string> canonical() const;
  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(const std::string& s);
double parse_number(const std::string& key, const std::string& text);

}  // namespace glthermo::cli
