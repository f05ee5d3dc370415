#pragma once

namespace weaklab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace weaklab
