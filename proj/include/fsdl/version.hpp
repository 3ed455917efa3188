#pragma once

namespace fsdl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fsdl
