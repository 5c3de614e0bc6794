#pragma once

#include <string_view>

namespace oem {

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace oem
