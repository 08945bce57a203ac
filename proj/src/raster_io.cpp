#include "lithomap/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "lithomap/error.hpp"

namespace lithomap {

Raster class_map_raster(const ClassMap& map) {
  Raster r;
  r.rows = map.rows;
  r.cols = map.cols;
  r.type = RasterType::UInt8;
  r.values.resize(map.labels.size());
  std::string names;
  for (std::size_t i = 0; i < map.class_names.size(); ++i) {
    if (i) names += ", ";
    names += map.class_names[i];
  }
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const int label = map.labels[i];
    if (label == kInvalidPixel) {
      r.values[i] = kRasterNoData;
    } else if (label == kUnassigned) {
      r.values[i] = kRasterUnassigned;
    } else {
      r.values[i] = static_cast<double>(label);
    }
  }
  r.extra["class names"] = "{" + names + "}";
  r.extra["data ignore value"] = std::to_string(kRasterNoData);
  return r;
}

Raster subclass_raster(std::size_t rows, std::size_t cols, const std::vector<std::size_t>& soil_indices,
                       const SubclassMap& subclasses) {
  if (soil_indices.size() != subclasses.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "subclass labels do not match the soil pixel list");
  }
  Raster r;
  r.rows = rows;
  r.cols = cols;
  r.type = RasterType::UInt8;
  r.values.assign(rows * cols, kRasterNoData);
  for (std::size_t k = 0; k < soil_indices.size(); ++k) {
    r.values.at(soil_indices[k]) = static_cast<double>(subclasses.labels[k]);
  }
  r.extra["class names"] = "{impurity, middle, mineral}";
  r.extra["data ignore value"] = std::to_string(kRasterNoData);
  return r;
}

Raster float_map_raster(std::size_t rows, std::size_t cols, const std::vector<double>& values) {
  if (values.size() != rows * cols) throw Error(ErrorCode::LengthMismatch, "map size does not match raster shape");
  Raster r;
  r.rows = rows;
  r.cols = cols;
  r.type = RasterType::Float32;
  r.values = values;
  for (double& v : r.values) {
    if (!std::isfinite(v)) v = kFloatNoData;
  }
  r.extra["data ignore value"] = "-1";
  return r;
}

std::vector<double> float_map_values(const Raster& raster) {
  std::vector<double> out = raster.values;
  for (double& v : out) {
    if (v == kFloatNoData || !std::isfinite(v)) v = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<double>& values, double lo, double hi) {
  if (values.size() != rows * cols) throw Error(ErrorCode::LengthMismatch, "quicklook size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << "P5\n" << cols << " " << rows << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<unsigned char> bytes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v == kFloatNoData) {
      bytes[i] = 0;
      continue;
    }
    const double scaled = std::clamp((v - lo) / span, 0.0, 1.0) * 255.0;
    bytes[i] = static_cast<unsigned char>(std::lround(scaled));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

void write_raster_pair(const Raster& raster, const std::filesystem::path& dir, const std::string& stem) {
  write_raster(raster, dir / (stem + ".hdr"), dir / (stem + ".img"));
}

}  // namespace lithomap
