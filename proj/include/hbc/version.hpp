#pragma once

namespace hbc {
inline constexpr const char* kVersion = "0.1.0";
}
