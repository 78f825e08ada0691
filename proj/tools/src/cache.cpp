#include "glthermo_cli/cache.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace glthermo::cli {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string cache_key(const std::string& command, const std::map<std::string, std::string>& params,
                      std::uint64_t seed) {
  std::string text = command;
  text += '\n';
  for (const auto& [k, v] : params) {
    if (k == "seed") continue;
    text += k + '=' + v + '\n';
  }
  text += "seed=" + std::to_string(seed) + '\n';
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path Cache::path(const std::string& key, const std::string& kind) const {
  return dir_ / (key + "." + kind);
}

std::optional<std::string> Cache::get(const std::string& key, const std::string& kind) const {
  if (!enabled()) return std::nullopt;
  std::ifstream in(path(key, kind), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void Cache::put(const std::string& key, std::string_view payload, const std::string& kind) const {
  if (!enabled()) return;
  write_atomic(path(key, kind), payload);
}

std::filesystem::path default_cache_dir() {
  if (const char* d = std::getenv("GLTHERMO_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "glthermo";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "glthermo";
  return std::filesystem::temp_directory_path() / "glthermo-cache";
}

}  // namespace glthermo::cli
