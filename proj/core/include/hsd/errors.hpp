#pragma once

#include <stdexcept>
#include <string>

namespace hsd {

// Malformed user input: bad config files, invalid plans, out-of-range values.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// residual_distribution called with p == q (zero normalizer). Callers that
// only reach the residual after a genuine rejection never see this.
class degenerate_residual_error : public std::runtime_error {
 public:
  explicit degenerate_residual_error(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant (e.g. a GSP graph with no path to a loop vertex).
class internal_error : public std::logic_error {
 public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hsd
