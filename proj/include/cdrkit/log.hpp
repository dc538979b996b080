#ifndef CDRKIT_LOG_HPP
#define CDRKIT_LOG_HPP

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace cdrkit::logging {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Verbosity from CDRKIT_LOG in {error, warn, info, debug}; default warn.
inline Level level() {
  static const Level lv = [] {
    const char* env = std::getenv("CDRKIT_LOG");
    if (!env) return Level::Warn;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    if (std::strcmp(env, "warn") == 0) return Level::Warn;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    return Level::Warn;
  }();
  return lv;
}

inline void log(Level lv, const std::string& msg) {
  if (lv > level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(lv)], msg.c_str());
}

inline void error(const std::string& m) { log(Level::Error, m); }
inline void warn(const std::string& m) { log(Level::Warn, m); }
inline void info(const std::string& m) { log(Level::Info, m); }
inline void debug(const std::string& m) { log(Level::Debug, m); }

}  // namespace cdrkit::logging

#endif  // CDRKIT_LOG_HPP
