#pragma once

namespace netkrr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace netkrr
