#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "lithomap/pipeline.hpp"
#include "lithomap/synth.hpp"

namespace lithomap {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;

struct ConvertOptions {
  std::filesystem::path input;        ///< ENVI header of the radiance cube
  std::filesystem::path radiometric;  ///< radiometric parameter file
  std::filesystem::path output;       ///< ENVI header to write
  std::string band_mask;
  int threads = 1;
};

struct ReportOptions {
  std::filesystem::path sites;
  std::filesystem::path ra;     ///< ENVI header of the RA map
  std::filesystem::path alpha;  ///< ENVI header of the alpha map
  std::filesystem::path output_dir;  ///< site_report.csv goes here when set
};

/// Radiance -> reflectance (+ band mask). Writes a float32 BSQ cube.
int cmd_convert(const ConvertOptions& options, std::ostream& out, std::ostream& err);

/// Full mapping run. Writes class_map, subclass_map, ra_map and alpha_map
/// rasters with PGM quicklooks, signatures.csv and manifest.json into the
/// output directory. Intermediates are written as soon as their stage
/// finishes, and a failed run still leaves a manifest naming the stage.
int cmd_map(const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// Site validation against ground-truth percentages.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

/// Write a synthetic scene (cube, truth rasters, lab signature, a ready
/// map.cfg) into `output_dir`.
int cmd_synth(const SceneSpec& spec, const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err);

/// Run `body`, translating library errors into their exit codes with a
/// one-line message on `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace lithomap
