#include "precipuq/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace precipuq::log {

namespace {

Level parse_level(const char* s) {
  if (s == nullptr) return Level::error;
  std::string v(s);
  if (v == "off" || v == "0" || v == "none") return Level::off;
  if (v == "error") return Level::error;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::error;
}

}  // namespace

Level threshold() {
  static Level level = parse_level(std::getenv("PRECIP_UQ_LOG"));
  return level;
}

void write(Level level, const std::string& message) {
  if (level > threshold()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const char* tag = level == Level::error ? "error" : level == Level::info ? "info" : "debug";
  std::cerr << "[precip_uq " << tag << "] " << message << '\n';
}

}  // namespace precipuq::log
