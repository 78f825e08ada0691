#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "json.hpp"

#include "glthermo_cli/app.hpp"
#include "glthermo_cli/cache.hpp"
#include "glthermo_cli/config.hpp"

using namespace glthermo::cli;
using ojson = nlohmann::ordered_json;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("glthermo-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Config, SectionsCommentsAndCommonKeys) {
  std::istringstream in("tol = 1e-9\n# comment\n; other\n[m0]\nb = 0.5 \n side=8\n[check]\nbs =\n");
  ConfigFile c = parse_config(in, "test");
  ASSERT_NE(c.section("common"), nullptr);
  EXPECT_EQ(c.section("common")->at("tol"), "1e-9");
  EXPECT_EQ(c.section("m0")->at("b"), "0.5");
  EXPECT_EQ(c.section("m0")->at("side"), "8");
  EXPECT_EQ(c.section("check")->at("bs"), "");
  EXPECT_EQ(c.section("g"), nullptr);
}

TEST(Config, MalformedLinesAreUsageErrors) {
  std::istringstream a("[m0\n");
  EXPECT_THROW(parse_config(a, "a"), UsageError);
  std::istringstream b("just words\n");
  EXPECT_THROW(parse_config(b, "b"), UsageError);
  std::istringstream c("= 3\n");
  EXPECT_THROW(parse_config(c, "c"), UsageError);
}

TEST(Config, BuiltinDefaultParses) {
  ConfigFile c = load_config("default");
  EXPECT_NE(c.section("check"), nullptr);
  EXPECT_NE(c.section("e2"), nullptr);
}

TEST(Params, CanonicalNumbersShareKeys) {
  Params a, b;
  a.set("b", "0.50");
  a.set("sides", "8, 12,16");
  b.set("b", "5e-1");
  b.set("sides", "8,12,16");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(cache_key("m0", a.canonical(), 0), cache_key("m0", b.canonical(), 0));
  EXPECT_NE(cache_key("m0", a.canonical(), 0), cache_key("m0", a.canonical(), 1));
  EXPECT_NE(cache_key("m0", a.canonical(), 0), cache_key("mp", a.canonical(), 0));
}

TEST(Params, TypedAccess) {
  Params p;
  p.set("x", "2.5");
  p.set("n", "3");
  p.set("list", "1,2,3");
  EXPECT_DOUBLE_EQ(p.num("x"), 2.5);
  EXPECT_EQ(p.integer("n"), 3);
  EXPECT_THROW(p.integer("x"), UsageError);
  EXPECT_EQ(p.ints("list"), (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(p.num("missing"), UsageError);
  p.set("bad", "abc");
  EXPECT_THROW(p.num("bad"), UsageError);
}

TEST(Cache, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Cache, AtomicWriteAndReadBack) {
  TempDir dir;
  Cache c(dir.path());
  EXPECT_FALSE(c.get("k").has_value());
  c.put("k", "payload");
  ASSERT_TRUE(c.get("k").has_value());
  EXPECT_EQ(*c.get("k"), "payload");
  int entries = 0;
  for (auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
}

TEST(App, NegativeFieldIsUsageError) {
  CliRun r = invoke({"m0", "--b", "-0.1", "--side", "8", "--no-cache"});
  EXPECT_EQ(r.code, exit_usage);
  EXPECT_NE(r.err.find("non-negative"), std::string::npos);
}

TEST(App, UnknownCommandAndFlagAreUsageErrors) {
  EXPECT_EQ(invoke({"frobnicate"}).code, exit_usage);
  EXPECT_EQ(invoke({"m0", "--b", "0.5", "--side", "8", "--colour", "red"}).code, exit_usage);
  EXPECT_EQ(invoke({"m0", "--side", "8", "--no-cache"}).code, exit_usage);
  EXPECT_EQ(invoke({"m0", "--b", "0.5", "--side", "8", "--format", "xml"}).code, exit_usage);
  EXPECT_EQ(invoke({}).code, exit_usage);
}

TEST(App, QuantizationViolationIsUsageError) {
  EXPECT_EQ(invoke({"mp", "--b", "0.5", "--N", "0", "--no-cache"}).code, exit_usage);
}

TEST(App, ZeroFieldAnchorJsonSchema) {
  CliRun r = invoke({"m0", "--b", "0", "--side", "4", "--spacing", "0.25", "--levels", "3", "--no-cache"});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  ojson j = ojson::parse(r.out);
  std::vector<std::string> keys;
  for (auto& [k, v] : j.items()) keys.push_back(k);
  std::vector<std::string> expected{"command",   "params",        "energy",    "breakdown", "residual",
                                    "spacing",   "extrapolated",  "bounds_checked", "seed", "wall_time_s",
                                    "tolerance", "converged",     "details",   "build_id",  "cache_key",
                                    "timestamps"};
  EXPECT_EQ(keys, expected);
  EXPECT_NEAR(j["extrapolated"]["value"].get<double>(), -8.0, 1e-9);
  EXPECT_EQ(j["params"]["b"], "0");
  for (auto& b : j["bounds_checked"]) EXPECT_TRUE(b["pass"].get<bool>()) << b["name"];
}

TEST(App, CsvHeaderIsFixed) {
  CliRun r = invoke({"m0", "--b", "0.5", "--side", "4", "--levels", "1", "--no-cache", "--format", "csv"});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  std::string header = r.out.substr(0, r.out.find('\n'));
  EXPECT_EQ(header,
            "command,label,b,side,N,spacing,seed,energy,kinetic,condensation,quartic,residual,extrapolated_value,"
            "extrapolated_order,extrapolated_residual,bounds_pass,converged,wall_time_s");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST(App, CacheHitIsByteIdentical) {
  TempDir dir;
  std::vector<std::string> args{"m0", "--b", "0.6", "--side", "5", "--levels", "1",
                                "--cache-dir", dir.path().string()};
  CliRun a = invoke(args);
  CliRun b = invoke(args);
  ASSERT_EQ(a.code, exit_ok) << a.err;
  EXPECT_EQ(a.out, b.out);
  // a different tolerance must not reuse the entry
  args.insert(args.end(), {"--tol", "1e-9"});
  CliRun c = invoke(args);
  EXPECT_NE(ojson::parse(a.out)["cache_key"], ojson::parse(c.out)["cache_key"]);
}

TEST(App, ReproducibleRunsAreByteIdentical) {
  TempDir dir;
  std::vector<std::string> args{"mp", "--b", "0.8", "--N", "2", "--no-cache", "--reproducible", "--out",
                                (dir.path() / "a.json").string()};
  ASSERT_EQ(invoke(args).code, exit_ok);
  args.back() = (dir.path() / "b.json").string();
  ASSERT_EQ(invoke(args).code, exit_ok);
  std::string a = slurp(dir.path() / "a.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir.path() / "b.json"));
  EXPECT_EQ(ojson::parse(a)["wall_time_s"].get<double>(), 0.0);
}

TEST(App, FlagsOverrideConfigWhichOverridesDefaults) {
  TempDir dir;
  {
    std::ofstream cfg(dir.path() / "run.ini");
    cfg << "[common]\nrestarts = 2\nlevels = 2\n[m0]\nlevels = 1\nside = 4\n";
  }
  CliRun r = invoke({"m0", "--b", "0.5", "--config", (dir.path() / "run.ini").string(), "--side", "5", "--no-cache"});
  ASSERT_EQ(r.code, exit_ok) << r.err;
  ojson p = ojson::parse(r.out)["params"];
  EXPECT_EQ(p["restarts"], "2");
  EXPECT_EQ(p["levels"], "1");
  EXPECT_EQ(p["side"], "5");
  EXPECT_EQ(p["spacing"], "0.25");
}

TEST(App, UnknownConfigKeyIsUsageError) {
  TempDir dir;
  {
    std::ofstream cfg(dir.path() / "bad.ini");
    cfg << "[m0]\nsidee = 4\n";
  }
  EXPECT_EQ(invoke({"m0", "--b", "0.5", "--side", "4", "--config", (dir.path() / "bad.ini").string()}).code,
            exit_usage);
}

TEST(App, RequireCachedFailsWithStructuredRecord) {
  TempDir dir;
  CliRun r = invoke({"trial3d", "--kappa", "10", "--H", "9", "--E2", "-0.43", "--N", "2", "--cache-dir",
                  dir.path().string(), "--require-cached"});
  EXPECT_EQ(r.code, exit_numerical);
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j["command"], "trial3d");
  EXPECT_EQ(j["error"]["kind"], "numerical");
}

TEST(App, TrialUsesCachedPeriodicField) {
  TempDir dir;
  std::vector<std::string> base{"--N", "2", "--cache-dir", dir.path().string()};
  std::vector<std::string> trial{"trial3d", "--kappa", "10", "--H", "9", "--E2", "-0.43", "--eta", "0.3",
                                 "--box-side", "1.5"};
  trial.insert(trial.end(), base.begin(), base.end());
  CliRun first = invoke(trial);
  ASSERT_EQ(first.code, exit_ok) << first.err;
  // the periodic input is now cached, so a different trial needs no solve
  trial[8] = "0.25";
  trial.push_back("--require-cached");
  CliRun second = invoke(trial);
  EXPECT_EQ(second.code, exit_ok) << second.err;
}

TEST(App, CheckCorruptionExitsNumerical) {
  std::vector<std::string> args{"check", "--bs", "0.5", "--sides", "4,6", "--Ns", "2", "--abrikosov-bs", "",
                                "--sigmas", "0.1", "--tiling-sides", "4", "--no-cache", "--format", "csv"};
  CliRun clean = invoke(args);
  EXPECT_EQ(clean.code, exit_ok) << clean.out;
  EXPECT_EQ(clean.out.substr(0, clean.out.find('\n')), "name,point,lhs,rhs,slack,pass,hard");
  args.insert(args.end(), {"--corrupt", "2"});
  EXPECT_EQ(invoke(args).code, exit_numerical);
}

TEST(App, SweepMatchesIndividualRuns) {
  TempDir dir;
  CliRun s = invoke({"sweep", "--command", "m0", "--bs", "0.4,0.8", "--sides", "4", "--levels", "1", "--threads", "2",
                  "--cache-dir", dir.path().string()});
  ASSERT_EQ(s.code, exit_ok) << s.err;
  ojson j = ojson::parse(s.out);
  ASSERT_EQ(j["details"]["points"].size(), 2u);
  CliRun one = invoke({"m0", "--b", "0.8", "--side", "4", "--levels", "1", "--cache-dir", dir.path().string(),
                    "--require-cached"});
  ASSERT_EQ(one.code, exit_ok) << one.err;
  EXPECT_EQ(ojson::parse(one.out)["energy"], j["details"]["points"][1]["energy"]);
}

TEST(App, VersionPrintsBuildId) {
  CliRun r = invoke({"--version"});
  EXPECT_EQ(r.code, exit_ok);
  EXPECT_NE(r.out.find(build_id()), std::string::npos);
}
