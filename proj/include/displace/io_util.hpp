#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace displace {

/// Formats a real with 12 significant digits, the fixed precision used by all
/// machine-readable outputs so that re-runs diff cleanly.
std::string format_real(double v);

/// FNV-1a 64-bit over a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t seed = 14695981039346656037ull);

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 14695981039346656037ull) {
    return fnv1a64(s.data(), s.size(), seed);
}

/// FNV-1a 64-bit of a whole file's contents. Throws displace::Error when the
/// file cannot be read.
std::uint64_t fnv1a64_file(const std::string& path);

/// Hex rendering (16 lowercase digits) of a 64-bit checksum.
std::string to_hex(std::uint64_t v);

/// JSON string escaping (quotes not included).
std::string json_escape(std::string_view s);

} // namespace displace
