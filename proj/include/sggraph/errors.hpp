#pragma once

#include <stdexcept>
#include <string>

namespace sggraph {

// Config/argument problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Guard refusals: oversized enumeration windows, subcritical-regime refusals
// (CLI exit code 3).
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A clan construction hit its rectangle or time-depth cap (CLI exit code 4).
// Carries the partial statistics at the point of failure; truncating instead
// would bias the sampler.
struct CapExceededError : std::runtime_error {
  CapExceededError(const std::string& what, std::size_t rectangles, double time_depth)
      : std::runtime_error(what), rectangles(rectangles), time_depth(time_depth) {}
  std::size_t rectangles;
  double time_depth;
};

}  // namespace sggraph
