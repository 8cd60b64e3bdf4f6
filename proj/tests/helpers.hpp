#pragma once

#include <functional>
#include <optional>

#include "rankfreq/error.hpp"

// Kind of the rankfreq::Error thrown by f, or nullopt if nothing was thrown.
inline std::optional<rankfreq::ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const rankfreq::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
