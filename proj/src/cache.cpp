#include "fqms/cache.hpp"

#include <cstdlib>
#include <fstream>

#include "fqms/common.hpp"

namespace fqms {

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

DeCache::DeCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    warn("cache directory '" + dir_.string() + "' unusable (" +
         ec.message() + "); caching disabled");
    dir_.clear();
  }
}

DeCache DeCache::resolve(const std::string& cli_dir) {
  if (!cli_dir.empty()) return DeCache(cli_dir);
  if (const char* env = std::getenv("FQMS_CACHE_DIR"); env && *env)
    return DeCache(env);
  return DeCache();
}

std::filesystem::path DeCache::record_path(const std::string& kind,
                                           const nlohmann::json& key) const {
  const std::string id =
      hex64(fnv1a64(std::string(kDeEngineVersion) + "|" + kind + "|" +
                    key.dump()));
  return dir_ / (kind + "-" + id + ".json");
}

std::optional<nlohmann::json> DeCache::get(const std::string& kind,
                                           const nlohmann::json& key) const {
  if (!enabled()) return std::nullopt;
  const auto path = record_path(kind, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json rec;
  try {
    in >> rec;
  } catch (const std::exception&) {
    warn("cache record '" + path.string() + "' unreadable; recomputing");
    return std::nullopt;
  }
  if (!rec.is_object() || rec.value("engine", "") != kDeEngineVersion ||
      rec.value("kind", "") != kind || !rec.contains("key") ||
      !rec.contains("payload") || rec["key"] != key)
    return std::nullopt;
  const std::string sum = rec.value("checksum", "");
  if (sum != hex64(fnv1a64(rec["payload"].dump()))) {
    warn("cache record '" + path.string() + "' failed checksum; recomputing");
    return std::nullopt;
  }
  return rec["payload"];
}

void DeCache::put(const std::string& kind, const nlohmann::json& key,
                  const nlohmann::json& payload) const {
  if (!enabled()) return;
  nlohmann::json rec{{"engine", kDeEngineVersion},
                     {"kind", kind},
                     {"key", key},
                     {"payload", payload},
                     {"checksum", hex64(fnv1a64(payload.dump()))}};
  const auto path = record_path(kind, key);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      warn("cache write to '" + tmp + "' failed; skipping");
      return;
    }
    out << rec.dump();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    warn("cache rename to '" + path.string() + "' failed: " + ec.message());
    std::filesystem::remove(tmp, ec);
  }
}

}  // namespace fqms
