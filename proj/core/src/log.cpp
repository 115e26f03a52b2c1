#include "halftrack/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace halftrack::log {

namespace {

Level parse_env() {
  const char* v = std::getenv("HALFTRACK_LOG");
  if (v == nullptr) return Level::warn;
  if (std::strcmp(v, "error") == 0) return Level::error;
  if (std::strcmp(v, "warn") == 0) return Level::warn;
  if (std::strcmp(v, "info") == 0) return Level::info;
  if (std::strcmp(v, "debug") == 0) return Level::debug;
  return Level::warn;
}

Level& threshold_ref() {
  static Level lv = parse_env();
  return lv;
}

const char* name(Level lv) {
  switch (lv) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return threshold_ref(); }

void set_threshold(Level lv) { threshold_ref() = lv; }

void write(Level lv, const std::string& msg) {
  std::fprintf(stderr, "[halftrack %s] %s\n", name(lv), msg.c_str());
}

}  // namespace halftrack::log
