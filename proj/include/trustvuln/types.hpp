#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace trustvuln {

// Dense node handle. Same width as Eigen's default sparse StorageIndex so
// adjacency index arrays can be exposed directly as spans of NodeId.
using NodeId = std::int32_t;
using CommunityId = std::int32_t;

/// Malformed input record. `line()` is 1-based; 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error(line == 0 ? message
                                     : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace trustvuln
