#pragma once

namespace gof {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gof
