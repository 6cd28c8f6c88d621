#pragma once

#include <filesystem>
#include <string>

#include "slr/cloud.hpp"

namespace slr {

enum class Format {
    labeled_csv,  ///< text, header `x,y,z,label`, label 0=ground 1=non_ground 2=unlabeled
    ply,          ///< ascii or binary_little_endian on read; binary_little_endian on write
    bin,          ///< magic "SLRC", u64 count, then per point 3 x f64 + u8 label, little-endian
};

/// Parse a format name ("labeled_csv", "ply", "bin"). Throws ConfigError.
Format parse_format(const std::string& name);
std::string format_name(Format f);

/// Guess from the file extension (.csv, .ply, .bin). Throws ConfigError on
/// unknown extensions.
Format format_from_path(const std::filesystem::path& path);

PointCloud load_cloud(const std::filesystem::path& path, Format format);
void store_cloud(const PointCloud& cloud, const std::filesystem::path& path, Format format);

}  // namespace slr
