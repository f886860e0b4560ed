#pragma once

#include <string>

namespace precipuq::log {

enum class Level { off = 0, error = 1, info = 2, debug = 3 };

// Verbosity comes from the PRECIP_UQ_LOG env var (off|error|info|debug),
// read once on first use. Messages go to stderr.
Level threshold();

void write(Level level, const std::string& message);

inline void error(const std::string& m) { write(Level::error, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void debug(const std::string& m) { write(Level::debug, m); }

}  // namespace precipuq::log
