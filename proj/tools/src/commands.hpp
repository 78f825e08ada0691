#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "glthermo/minimize.hpp"
#include "glthermo_cli/cache.hpp"
#include "glthermo_cli/config.hpp"

namespace glthermo::cli {

using ojson = nlohmann::ordered_json;

struct Result {
  ojson record = ojson::object();  // energy .. details, filled by the command
  ojson rows = ojson::array();     // CSV rows, one object per row
  bool failed_checks = false;      // hard property failures (check command)
};

struct Context;
using SubRunner = std::function<ojson(const std::string& command, Params params)>;

struct Context {
  Params params;
  std::uint64_t seed = 0;
  int threads = 1;
  Cache cache;
  bool require_cached = false;
  SubRunner sub;  // runs another command through the cache, returns its stored payload
};

struct CommandSpec {
  std::string name;
  std::string description;
  std::vector<std::string> keys;                                // result-defining parameters
  std::vector<std::pair<std::string, std::string>> defaults;  // applied after config and flags
  std::function<Result(const Context&)> run;
};

const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(const std::string& name);

// Rows of the csv output use these columns in this order.
const std::vector<std::string>& result_columns();
const std::vector<std::string>& check_columns();

}  // namespace glthermo::cli
