#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rankfreq {

enum class ErrorKind {
  schema,
  parse,
  empty_input,
  empty_result,
  domain,
  insufficient_data,
  undefined_correlation,
  decode,
};

const char* to_string(ErrorKind kind);

// Single exception type for the toolkit. The kind drives CLI exit codes;
// parse errors carry the 1-based input line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace rankfreq
