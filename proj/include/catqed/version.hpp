#pragma once

namespace catqed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace catqed
