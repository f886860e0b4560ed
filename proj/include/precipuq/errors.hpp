#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace precipuq {

// Malformed input file. `line` is 1-based; 0 means "not line-addressable".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Ingestion produced an empty dataset.
class NoSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace precipuq
