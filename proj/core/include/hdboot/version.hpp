#pragma once

namespace hdboot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hdboot
