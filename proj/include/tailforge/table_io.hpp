#pragma once

// Versioned little-endian binary format for tile tables, so the setup cost can
// be paid once. Byte layout in docs/formats.md.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "tailforge/tiler.hpp"

namespace tailforge {

class TableFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kTableFormatVersion = 1;

void write_table(const TileTable& table, std::ostream& out);
/// Validates magic, version, parameters, region, tile bounds and checksum.
TileTable read_table(std::istream& in);

void save_table(const TileTable& table, const std::filesystem::path& path);
TileTable load_table(const std::filesystem::path& path);

}  // namespace tailforge
