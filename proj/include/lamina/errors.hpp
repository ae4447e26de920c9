#pragma once

#include <stdexcept>
#include <string>

namespace lamina {

// Bad or missing input data (manifest, rasters, pose table, CLI arguments).
// The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A pipeline stage could not produce a result from otherwise valid input
// (no key-frame candidate, all points rejected as noise, ...).
// The CLI maps this to exit code 3.
class pipeline_error : public std::runtime_error {
 public:
  explicit pipeline_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lamina
