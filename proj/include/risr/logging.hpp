#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace risr::log {

enum class Level { off = 0, error = 1, info = 2, debug = 3 };

inline Level level() {
  static Level lv = [] {
    const char* env = std::getenv("INERTIA_REGION_LOG");
    if (!env) return Level::error;
    std::string s(env);
    if (s == "off") return Level::off;
    if (s == "error") return Level::error;
    if (s == "info") return Level::info;
    if (s == "debug") return Level::debug;
    return Level::error;
  }();
  return lv;
}

inline void emit(Level lv, const std::string& tag, const std::string& msg) {
  if (static_cast<int>(lv) <= static_cast<int>(level()))
    std::cerr << "[" << tag << "] " << msg << "\n";
}

inline void error(const std::string& msg) { emit(Level::error, "error", msg); }
inline void info(const std::string& msg) { emit(Level::info, "info", msg); }
inline void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace risr::log
