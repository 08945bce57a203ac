#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lithomap/cube.hpp"

namespace lithomap {

enum class Interleave { Bsq, Bil, Bip };

std::string interleave_name(Interleave i);
Interleave parse_interleave(const std::string& s);

/// Parsed ENVI header. Keys are lowercased; brace-delimited values keep
/// their inner text without the braces.
struct EnviHeader {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::size_t bands = 0;
  std::size_t header_offset = 0;
  int data_type = 4;
  int byte_order = 0;
  Interleave interleave = Interleave::Bsq;
  std::vector<double> wavelengths;
  std::map<std::string, std::string> fields;

  static EnviHeader parse(const std::string& text);
  static EnviHeader load(const std::filesystem::path& path);
  std::size_t bytes_per_sample() const;
};

/// Read an ENVI cube (int16 or float32, any interleave, either byte order).
HyperspectralCube read_envi(const std::filesystem::path& header_path, const std::filesystem::path& data_path);

/// Write `cube` little-endian in its sample type. The band mask travels as
/// the `bbl` key and the unit flag as `units`.
void write_envi(const HyperspectralCube& cube, const std::filesystem::path& header_path,
                const std::filesystem::path& data_path, Interleave interleave = Interleave::Bsq);

/// Single-band rasters (class maps, abundance maps).
enum class RasterType { UInt8, Float32 };

struct Raster {
  std::size_t rows = 0;
  std::size_t cols = 0;
  RasterType type = RasterType::Float32;
  std::vector<double> values;  ///< row-major
  std::map<std::string, std::string> extra;  ///< additional header keys

  double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
};

void write_raster(const Raster& raster, const std::filesystem::path& header_path,
                  const std::filesystem::path& data_path);
Raster read_raster(const std::filesystem::path& header_path, const std::filesystem::path& data_path);

/// Companion data path for a header: "x.hdr" -> "x.img".
std::filesystem::path data_path_for(const std::filesystem::path& header_path);

}  // namespace lithomap
