#pragma once

#include <optional>

#include "wavemech/error.hpp"

// Code of the wavemech::Error thrown by f, or nullopt when it returns normally.
template <typename F>
std::optional<wavemech::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const wavemech::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
