#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace glthermo::cli {

std::uint64_t fnv1a64(std::string_view data);

// Hex FNV-1a of the command, the canonical parameters in key order and the seed.
std::string cache_key(const std::string& command, const std::map<std::string, std::string>& params,
                      std::uint64_t seed);

// Writes through a uniquely named temporary in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, std::string_view content);

class Cache {
 public:
  Cache() = default;
  explicit Cache(std::filesystem::path dir);
  bool enabled() const { return !dir_.empty(); }
  std::optional<std::string> get(const std::string& key, const std::string& kind = "json") const;
  void put(const std::string& key, std::string_view payload, const std::string& kind = "json") const;
  std::filesystem::path path(const std::string& key, const std::string& kind) const;

 private:
  std::filesystem::path dir_;
};

std::filesystem::path default_cache_dir();

}  // namespace glthermo::cli
