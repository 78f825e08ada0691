#include "glthermo_cli/app.hpp"

#include <chrono>
#include <charconv>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"

#ifndef GLTHERMO_BUILD_ID
#define GLTHERMO_BUILD_ID "glthermo-unknown"
#endif

namespace glthermo::cli {

namespace {

struct Control {
  std::string out;
  std::string format = "json";
  std::string cache_dir;
  int threads = 1;
  std::string config;
  bool no_cache = false;
  bool reproducible = false;
  bool require_cached = false;
};

const std::set<std::string> config_control_keys{"threads", "format", "cache-dir"};

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw UsageError("--seed must be a non-negative integer");
  return v;
}

void apply_defaults(const CommandSpec& spec, Params& p) {
  for (const auto& [k, v] : spec.defaults) p.set_default(k, v);
  for (const auto& k : spec.keys)
    if (!p.has(k)) throw UsageError(spec.name + ": missing required --" + k);
}

ojson params_json(const Params& p) {
  ojson j = ojson::object();
  for (const auto& [k, v] : p.canonical()) j[k] = v;
  return j;
}

class Runner {
 public:
  Runner(const Control& c, Cache cache) : control_(c), cache_(std::move(cache)) {}

  // Runs one command with fully resolved parameters and returns the payload
  // {record, rows, failed_checks}, from the cache when present.
  // Inputs computed on behalf of another command (nested) must already be
  // cached under --require-cached.
  ojson exec(const CommandSpec& spec, const Params& params, bool nested = false) const {
    const std::uint64_t seed = params.has("seed") ? parse_seed(params.str("seed")) : 0;
    const std::string key = cache_key(spec.name, params.canonical(), seed);
    if (auto hit = cache_.get(key)) {
      try {
        return ojson::parse(*hit);
      } catch (const ojson::parse_error&) {
        // unreadable entry, recompute and overwrite
      }
    }
    if (nested && control_.require_cached)
      throw std::runtime_error("missing cached input: " + spec.name + " (key " + key + ")");

    Context ctx;
    ctx.params = params;
    ctx.seed = seed;
    ctx.threads = control_.threads;
    ctx.cache = cache_;
    ctx.require_cached = control_.require_cached;
    ctx.sub = [this](const std::string& name, Params p) {
      const CommandSpec* s = find_command(name);
      if (!s) throw std::logic_error("unknown command " + name);
      apply_defaults(*s, p);
      return exec(*s, p, true);
    };

    const std::string started = iso_now();
    auto t0 = std::chrono::steady_clock::now();
    Result res = spec.run(ctx);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ojson record = ojson::object();
    record["command"] = spec.name;
    record["params"] = params_json(params);
    for (const char* f : {"energy", "breakdown", "residual", "spacing", "extrapolated", "bounds_checked"})
      record[f] = res.record.contains(f) ? res.record[f] : ojson(nullptr);
    record["seed"] = seed;
    record["wall_time_s"] = wall;
    for (const char* f : {"tolerance", "converged", "details"})
      record[f] = res.record.contains(f) ? res.record[f] : ojson(nullptr);
    record["build_id"] = build_id();
    record["cache_key"] = key;
    record["timestamps"] = {{"started", started}, {"finished", iso_now()}};

    ojson payload = ojson::object();
    payload["record"] = record;
    payload["rows"] = res.rows;
    payload["failed_checks"] = res.failed_checks;
    cache_.put(key, payload.dump());
    return payload;
  }

 private:
  Control control_;
  Cache cache_;
};

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, p);
  }
  if (v.is_number()) return v.dump();
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string render(const ojson& payload, const std::string& format) {
  const ojson& record = payload["record"];
  if (format == "json") return record.dump(2) + "\n";
  const bool check = record["command"] == "check";
  const auto& cols = check ? check_columns() : result_columns();
  std::string text;
  for (std::size_t i = 0; i < cols.size(); ++i) text += (i ? "," : "") + cols[i];
  text += "\n";
  for (ojson row : payload["rows"]) {
    if (!check) row["wall_time_s"] = record["wall_time_s"];
    for (std::size_t i = 0; i < cols.size(); ++i)
      text += (i ? "," : "") + csv_cell(row.contains(cols[i]) ? row[cols[i]] : ojson(nullptr));
    text += "\n";
  }
  return text;
}

// Drops run-dependent metadata everywhere, including records nested by sweep.
void scrub_timing(ojson& j) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) {
      if (k == "wall_time_s")
        v = 0.0;
      else if (k == "timestamps")
        v = nullptr;
      else
        scrub_timing(v);
    }
  } else if (j.is_array()) {
    for (auto& v : j) scrub_timing(v);
  }
}

void emit(const std::string& text, const Control& c, std::ostream& out) {
  if (c.out.empty() || c.out == "-")
    out << text;
  else
    write_atomic(c.out, text);
}

}  // namespace

std::string build_id() { return GLTHERMO_BUILD_ID; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for the reduced Ginzburg-Landau functional", "glthermo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", build_id());

  Control control;
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::string> threads_text;
  for (const auto& spec : commands()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.description);
    auto& values = flag_values[spec.name];
    for (const auto& k : spec.keys) {
      std::string help;
      for (const auto& [dk, dv] : spec.defaults)
        if (dk == k) help = "default: " + (dv.empty() ? std::string("(empty)") : dv);
      if (help.empty()) help = "required";
      sub->add_option("--" + k, values[k], help);
    }
    sub->add_option("--out", control.out, "write the result to this file");
    sub->add_option("--format", control.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--cache-dir", control.cache_dir, "result cache directory");
    sub->add_option("--threads", threads_text[spec.name], "worker threads");
    sub->add_option("--config", control.config, "INI file, or 'default' for the built-in one");
    sub->add_flag("--no-cache", control.no_cache, "neither read nor write the cache");
    sub->add_flag("--reproducible", control.reproducible, "zero wall time and drop timestamps");
    sub->add_flag("--require-cached", control.require_cached, "fail instead of computing missing inputs");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  const CommandSpec* spec = nullptr;
  for (const auto& c : commands())
    if (app.got_subcommand(c.name)) spec = &c;
  CLI::App* sub = app.get_subcommand(spec->name);

  Params params;
  ojson error_record;
  try {
    std::set<std::string> keys(spec->keys.begin(), spec->keys.end());
    std::map<std::string, std::string> control_from_config;
    if (!control.config.empty()) {
      ConfigFile cfg = load_config(control.config);
      for (const auto& [name, section] : cfg.sections) {
        if (name != "common" && !find_command(name)) throw UsageError("config: unknown section [" + name + "]");
        if (name != "common" && name != spec->name) continue;
        for (const auto& [k, v] : section) {
          if (!keys.count(k) && !config_control_keys.count(k)) {
            if (name == "common") continue;
            throw UsageError("config: unknown key '" + k + "' in [" + name + "]");
          }
        }
      }
      for (const char* name : {"common", spec->name.c_str()}) {
        const auto* section = cfg.section(name);
        if (!section) continue;
        for (const auto& [k, v] : *section) {
          if (keys.count(k)) params.set(k, v);
          if (config_control_keys.count(k)) control_from_config[k] = v;
        }
      }
    }
    for (const auto& k : spec->keys)
      if (sub->count("--" + k) > 0) params.set(k, flag_values[spec->name][k]);
    apply_defaults(*spec, params);

    auto control_value = [&](const std::string& opt, const std::string& key, std::string& target) {
      if (sub->count(opt) == 0 && control_from_config.count(key)) target = control_from_config[key];
    };
    control_value("--format", "format", control.format);
    if (control.format != "json" && control.format != "csv") throw UsageError("--format must be json or csv");
    control_value("--cache-dir", "cache-dir", control.cache_dir);
    std::string threads = threads_text[spec->name];
    control_value("--threads", "threads", threads);
    if (!threads.empty()) {
      double t = parse_number("threads", threads);
      if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
      if (t < 1 || t != static_cast<int>(t)) throw UsageError("--threads must be a positive integer or 0");
      control.threads = static_cast<int>(t);
    }

    Cache cache;
    if (!control.no_cache) cache = Cache(control.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(control.cache_dir));
    Runner runner(control, cache);
    ojson payload = runner.exec(*spec, params);
    if (control.reproducible) scrub_timing(payload);
    emit(render(payload, control.format), control, out);
    return payload["failed_checks"].get<bool>() ? exit_numerical : exit_ok;
  } catch (const std::invalid_argument& e) {
    err << "glthermo " << spec->name << ": " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    error_record["command"] = spec->name;
    error_record["params"] = params_json(params);
    error_record["error"] = {{"kind", "numerical"}, {"message", e.what()}};
    error_record["build_id"] = build_id();
    err << "glthermo " << spec->name << ": " << e.what() << "\n";
  }
  try {
    emit(error_record.dump(2) + "\n", control, out);
  } catch (const std::exception& e) {
    err << "glthermo: " << e.what() << "\n";
  }
  return exit_numerical;
}

}  // namespace glthermo::cli
