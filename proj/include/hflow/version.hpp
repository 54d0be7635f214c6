#pragma once

namespace hflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hflow
