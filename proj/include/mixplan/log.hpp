#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace mixplan::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

/// Level comes from MIXPLAN_LOG={error|info|debug}; default is error-only.
inline Level level() {
  static const Level lv = [] {
    const char* env = std::getenv("MIXPLAN_LOG");
    if (!env) return Level::Error;
    std::string s(env);
    if (s == "debug") return Level::Debug;
    if (s == "info") return Level::Info;
    return Level::Error;
  }();
  return lv;
}

inline bool enabled(Level lv) { return static_cast<int>(lv) <= static_cast<int>(level()); }

template <typename... Args>
inline void emit(Level lv, const char* tag, Args&&... args) {
  if (!enabled(lv)) return;
  std::ostringstream os;
  os << "[" << tag << "] ";
  (os << ... << args);
  std::cerr << os.str() << "\n";
}

template <typename... Args>
inline void error(Args&&... args) {
  emit(Level::Error, "error", std::forward<Args>(args)...);
}
template <typename... Args>
inline void info(Args&&... args) {
  emit(Level::Info, "info", std::forward<Args>(args)...);
}
template <typename... Args>
inline void debug(Args&&... args) {
  emit(Level::Debug, "debug", std::forward<Args>(args)...);
}

}  // namespace mixplan::log
