#pragma once

#include "spectest/common.hpp"

#include <string>

namespace spectest::detail {

// Runs f(), rethrowing library errors as the same type with "stage: " prefixed.
template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NonConvergence& e) {
    throw NonConvergence(std::string(stage) + ": " + e.what(), e.final_gap());
  } catch (const DegenerateData& e) {
    throw DegenerateData(std::string(stage) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(stage) + ": " + e.what());
  }
}

}  // namespace spectest::detail
