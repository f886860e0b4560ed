#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "precipuq/bench.hpp"

namespace precipuq {

struct DataPaths {
  std::string gauges;
  std::string grid_a;
  std::string grid_b;
  bool regrid_b_to_a = false;
};

// Strict JSON run configuration: a `version` field is required and unknown
// keys are rejected everywhere, so silent default drift cannot happen.
struct RunConfig {
  BenchmarkConfig bench;
  std::optional<DataPaths> data;
  std::string output_dir = "out";
  bool plots = false;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);
};

}  // namespace precipuq
