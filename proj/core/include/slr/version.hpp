#pragma once

namespace slr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace slr
