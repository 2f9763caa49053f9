#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>

namespace peakgeom {

// Output JSON keeps insertion order so artifacts are byte-stable.
using Json = nlohmann::ordered_json;

// FNV-1a 64-bit; used to stamp artifacts with a hash of the canonical config.
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);

// Write via temp file + rename so readers never observe partial output.
void atomic_write(const std::string& path, const std::string& content);

// Shortest round-trip formatting for CSV cells.
std::string fmt_double(double x);

} // namespace peakgeom
