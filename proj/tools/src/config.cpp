#include "glthermo_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "default_config.inc"

namespace glthermo::cli {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool try_number(const std::string& text, double& v) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && p == last;
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

const std::map<std::string, std::string>* ConfigFile::section(const std::string& name) const {
  auto it = sections.find(name);
  return it == sections.end() ? nullptr : &it->second;
}

ConfigFile parse_config(std::istream& in, const std::string& origin) {
  ConfigFile cfg;
  std::string current = "common";
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw UsageError(origin + ":" + std::to_string(number) + ": malformed section header");
      current = trim(t.substr(1, t.size() - 2));
      cfg.sections[current];
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(number) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError(origin + ":" + std::to_string(number) + ": empty key");
    cfg.sections[current][key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  if (path == "default") {
    std::istringstream in(builtin_default_config());
    return parse_config(in, "default");
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  return parse_config(in, path);
}

const char* builtin_default_config() { return kDefaultConfig; }

void Params::set_default(const std::string& key, const std::string& value) {
  if (!has(key)) values_[key] = value;
}

std::string Params::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("missing required parameter --" + key);
  return it->second;
}

double parse_number(const std::string& key, const std::string& text) {
  double v;
  if (!try_number(trim(text), v) || !std::isfinite(v))
    throw UsageError("parameter --" + key + " expects a number, got '" + text + "'");
  return v;
}

double Params::num(const std::string& key) const { return parse_number(key, str(key)); }

int Params::integer(const std::string& key) const {
  double v = num(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("parameter --" + key + " expects an integer");
  return static_cast<int>(v);
}

bool Params::flag(const std::string& key) const {
  if (!has(key)) return false;
  std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("parameter --" + key + " expects true or false");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Params::nums(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(str(key))) out.push_back(parse_number(key, item));
  return out;
}

std::vector<int> Params::ints(const std::string& key) const {
  std::vector<int> out;
  for (double v : nums(key)) {
    if (v != std::floor(v)) throw UsageError("parameter --" + key + " expects integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::map<std::string, std::string> Params::canonical() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : values_) {
    std::string joined;
    for (const auto& item : split_list(v)) {
      double x;
      if (!joined.empty()) joined += ',';
      joined += try_number(item, x) ? shortest(x) : item;
    }
    out[k] = joined;
  }
  return out;
}

}  // namespace glthermo::cli
