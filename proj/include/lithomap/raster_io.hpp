#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lithomap/envi.hpp"
#include "lithomap/preclassify.hpp"
#include "lithomap/subclass.hpp"

namespace lithomap {

/// Byte codes used in exported label rasters.
inline constexpr std::uint8_t kRasterUnassigned = 254;
inline constexpr std::uint8_t kRasterNoData = 255;

/// Sentinel for non-soil pixels in float rasters (RA, alpha).
inline constexpr double kFloatNoData = -1.0;

/// Class ids as bytes; unassigned = 254, invalid pixels = 255.
Raster class_map_raster(const ClassMap& map);

/// Subclass codes (0 impurity, 1 middle, 2 mineral); non-soil = 255.
Raster subclass_raster(std::size_t rows, std::size_t cols, const std::vector<std::size_t>& soil_indices,
                       const SubclassMap& subclasses);

/// Float32 raster with NaN replaced by the -1 sentinel, which is also
/// recorded as the header's `data ignore value`.
Raster float_map_raster(std::size_t rows, std::size_t cols, const std::vector<double>& values);

/// Sentinel-aware inverse of float_map_raster: sentinel pixels become NaN.
std::vector<double> float_map_values(const Raster& raster);

/// 8-bit binary PGM. Values are scaled linearly from [lo, hi] to 0..255;
/// NaN and the float sentinel map to 0.
void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<double>& values, double lo, double hi);

/// Write `<stem>.hdr` + `<stem>.img` into `dir`.
void write_raster_pair(const Raster& raster, const std::filesystem::path& dir, const std::string& stem);

}  // namespace lithomap
