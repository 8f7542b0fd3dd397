#pragma once

namespace pmlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pmlab
