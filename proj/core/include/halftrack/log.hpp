#pragma once

#include <sstream>
#include <string>

namespace halftrack::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from the HALFTRACK_LOG environment variable
// (error|warn|info|debug), default warn. Messages go to stderr.
Level threshold();
void set_threshold(Level lv);
void write(Level lv, const std::string& msg);

template <typename... Args>
void emit(Level lv, Args&&... args) {
  if (lv > threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  write(lv, os.str());
}

template <typename... Args>
void error(Args&&... args) {
  emit(Level::error, std::forward<Args>(args)...);
}
template <typename... Args>
void warn(Args&&... args) {
  emit(Level::warn, std::forward<Args>(args)...);
}
template <typename... Args>
void info(Args&&... args) {
  emit(Level::info, std::forward<Args>(args)...);
}
template <typename... Args>
void debug(Args&&... args) {
  emit(Level::debug, std::forward<Args>(args)...);
}

}  // namespace halftrack::log
