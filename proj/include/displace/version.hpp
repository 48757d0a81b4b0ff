#pragma once

namespace displace {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace displace
