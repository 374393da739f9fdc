#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entropylab {

// Precondition and domain violations raise std::invalid_argument. The two
// types below carry extra information the CLI maps onto exit codes.

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A configured size limit (support, resolution, cell count) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entropylab
