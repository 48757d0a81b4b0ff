#pragma once

#include <cstdint>
#include <string>

#include "displace/citation_graph.hpp"

namespace displace {

inline constexpr char kSnapshotMagic[4] = {'D', 'I', 'S', 'P'};
inline constexpr std::uint8_t kSnapshotVersion = 1;

/// Writes the graph as a little-endian binary snapshot: magic + version,
/// id dictionary, CSR offset/edge arrays for both directions, metadata
/// columns, and a trailing FNV-1a 64-bit checksum over everything before it.
/// Bit-exact across platforms.
void save_snapshot(const CitationGraph& graph, const std::string& path);

/// Loads a snapshot. Magic/version mismatch raises SnapshotFormatError;
/// truncation or checksum failure raises SnapshotIntegrityError and no
/// partial graph is returned.
CitationGraph load_snapshot(const std::string& path);

} // namespace displace
