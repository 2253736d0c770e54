#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace fqms {

// Version tag for everything the analytical engine persists.  Bump it when
// the evolution, quadrature, or trace-table layout changes meaning; stale
// records then miss instead of poisoning new runs.
inline constexpr const char* kDeEngineVersion = "fqms-de-2";

uint64_t fnv1a64(std::string_view s);
std::string hex64(uint64_t v);

// Content-addressed result store.  Each record is one JSON file named by a
// hash of (engine version, kind, canonical key); on load the key and a
// payload checksum are verified, so a hash collision or a truncated file
// degrades to a cache miss, never to wrong data.  Disabled (default
// constructed) caches ignore all calls.
class DeCache {
 public:
  DeCache() = default;
  explicit DeCache(std::filesystem::path dir);

  bool enabled() const { return !dir_.empty(); }
  const std::filesystem::path& dir() const { return dir_; }

  std::optional<nlohmann::json> get(const std::string& kind,
                                    const nlohmann::json& key) const;
  void put(const std::string& kind, const nlohmann::json& key,
           const nlohmann::json& payload) const;

  // Cache directory resolution: explicit argument wins, else the
  // FQMS_CACHE_DIR environment variable, else disabled.
  static DeCache resolve(const std::string& cli_dir);

 private:
  std::filesystem::path record_path(const std::string& kind,
                                    const nlohmann::json& key) const;
  std::filesystem::path dir_;
};

}  // namespace fqms
