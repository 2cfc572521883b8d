#include "fewshot/core/log.hpp"

#include <cstdio>

namespace fewshot::log {

namespace {
Level g_level = Level::kInfo;

const char* tag(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
  }
  return "?";
}
}  // namespace

void set_level(Level level) { g_level = level; }

void write(Level level, const std::string& message) {
  if (level < g_level) return;
  std::fprintf(stderr, "[%s] %s\n", tag(level), message.c_str());
}

}  // namespace fewshot::log
