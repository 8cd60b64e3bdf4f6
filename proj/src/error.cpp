#include "rankfreq/error.hpp"

namespace rankfreq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::schema: return "schema error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::empty_result: return "empty result";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::undefined_correlation: return "undefined correlation";
    case ErrorKind::decode: return "decode error";
  }
  return "error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     std::optional<std::size_t> line) {
  std::string out = to_string(kind);
  if (line) out += " at line " + std::to_string(*line);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(decorate(kind, message, line)),
      kind_(kind),
      line_(line) {}

}  // namespace rankfreq
