#pragma once

namespace iconcap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace iconcap
