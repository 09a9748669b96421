#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace librarylens::log {

inline std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

inline bool quiet() {
  static const bool q = [] {
    const char* v = std::getenv("LIBRARYLENS_QUIET");
    return v && std::string_view(v) == "1";
  }();
  return q;
}

inline void warn(std::string_view msg) {
  if (quiet()) return;
  std::lock_guard lock(sink_mutex());
  std::cerr << "[librarylens] warning: " << msg << '\n';
}

inline void info(std::string_view msg) {
  if (quiet()) return;
  std::lock_guard lock(sink_mutex());
  std::cerr << "[librarylens] " << msg << '\n';
}

}  // namespace librarylens::log
