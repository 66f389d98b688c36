#pragma once
#include <stdexcept>
#include <string>

namespace icefreq {

// Single exception type for all library errors; messages carry the context
// (offending dates, line numbers, column names) demanded by callers.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace icefreq
