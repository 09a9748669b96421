#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <string_view>

namespace librarylens {

// Directory holding facet_keywords.json, palettes.json and fixture/.
// LIBRARYLENS_RESOURCES overrides the build-time default.
inline std::filesystem::path resource_dir() {
  if (const char* env = std::getenv("LIBRARYLENS_RESOURCES"); env && *env) return env;
#ifdef LIBRARYLENS_DEFAULT_RESOURCES
  return LIBRARYLENS_DEFAULT_RESOURCES;
#else
  return "data";
#endif
}

inline bool env_flag(const char* name) {
  const char* v = std::getenv(name);
  return v && std::string_view(v) == "1";
}

inline std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace librarylens
