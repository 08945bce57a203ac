#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lithomap/cube.hpp"
#include "lithomap/keyvalue.hpp"
#include "lithomap/preclassify.hpp"
#include "lithomap/project.hpp"
#include "lithomap/subclass.hpp"
#include "lithomap/unmix.hpp"

namespace lithomap {

/// Everything a mapping run depends on. Keys of the `key = value` config
/// match the field names; paths are resolved against the config file.
struct PipelineConfig {
  std::uint64_t seed = 1;
  int k_max = 10;
  std::optional<int> k_override;
  double similarity_threshold = 0.5;
  double ra_high = 0.8;
  double ra_low = 0.2;
  int restarts = 8;
  std::string band_mask;  ///< e.g. "0-6,57-75"; empty keeps the cube's mask
  std::filesystem::path cube;         ///< ENVI header of the input cube
  std::filesystem::path radiometric;  ///< only needed for radiance input
  std::filesystem::path library;      ///< laboratory signature CSV
  std::string soil_class;             ///< class id, "class_N" or a class_names entry
  std::vector<std::string> class_names;  ///< optional names in brightness order
  std::filesystem::path output_dir = "out";
  int threads = 1;
  bool pixel_csv = false;  ///< also dump per-soil-pixel results (small crops)

  /// Throws InvalidConfig on out-of-range values.
  void validate() const;

  /// Read from a parsed config; relative paths resolve against kv.base_dir().
  static PipelineConfig from_config(const KeyValueFile& kv);

  /// Canonical key = value text of the effective settings (sorted keys).
  /// Excludes `threads`, `output_dir` and `pixel_csv`, which do not change the results.
  std::string canonical() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// All intermediate products of one mapping run.
struct MapResult {
  ElbowCurve elbow;  ///< empty when k_override was used
  int k = 0;
  VcaResult candidates;
  ClassMap classes;
  int soil_class = -1;
  ClassPixels soil;
  SpectralSignature lab;  ///< resampled to the usable bands
  SubclassThresholds thresholds;
  std::vector<double> correlations;
  SubclassMap subclasses;
  RepresentativePair initial;
  FisherDirection direction;
  std::vector<ProjectedPixel> projections;
  SeparationReport separation;
  RepresentativePair refined;
  std::vector<double> ra_map;  ///< per raster pixel, NaN off soil
  AbundanceMap abundance;
  std::vector<StageTiming> timings;
};

/// Called after each stage with the partial result, e.g. to persist
/// intermediates before a later stage fails.
using StageHook = std::function<void(const std::string& stage, const MapResult& partial)>;

/// Run pre-classification through unmixing on a reflectance cube.
/// Errors keep their code and gain a "stage <name>:" prefix.
MapResult run_map(const PipelineConfig& config, const HyperspectralCube& reflectance,
                  const SpectralSignature& library, const StageHook& hook = {});

/// Resolve `soil_class` against the class map (numeric id, "class_N", or
/// a configured name). Throws InvalidConfig for unknown names.
int resolve_class(const std::string& name, const ClassMap& map);

/// Lowercase hex SHA-256 of a file's bytes / of a string.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace lithomap
