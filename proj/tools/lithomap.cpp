// lithomap: mineral relative-availability and abundance mapping.
//
//   lithomap convert CUBE.hdr --params radiometry.cfg --out DIR
//   lithomap map     --config map.cfg [--soil-class NAME] [--out DIR] ...
//   lithomap report  --sites sites.csv --ra ra_map.hdr --alpha alpha_map.hdr
//   lithomap synth   [--config scene.cfg] --out DIR
//
// Exit codes: 0 ok, 1 usage, 2 input error, 3 pipeline precondition
// violated, 4 numerical failure.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "lithomap/commands.hpp"
#include "lithomap/error.hpp"
#include "lithomap/keyvalue.hpp"

namespace {

struct SharedFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "RNG seed (overrides config)");
  cmd->add_option("--threads", f.threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory (overrides config)");
}

lithomap::KeyValueFile load_config(const std::string& path) {
  return path.empty() ? lithomap::KeyValueFile{} : lithomap::KeyValueFile::load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map relative availability and abundance of a target mineral in hyperspectral cubes"};
  app.require_subcommand(1);
  SharedFlags shared;

  auto* convert = app.add_subcommand("convert", "radiance cube -> TOA reflectance cube");
  add_shared(convert, shared);
  std::string convert_in, convert_params, convert_output, convert_mask;
  convert->add_option("input", convert_in, "ENVI header of the radiance cube")->required();
  convert->add_option("--params", convert_params, "radiometric parameter file (defaults to --config)");
  convert->add_option("--output", convert_output, "output header (default DIR/reflectance.hdr)");
  convert->add_option("--band-mask", convert_mask, "bands to drop, e.g. 0-6,57-75");

  auto* map = app.add_subcommand("map", "run the full mapping pipeline");
  add_shared(map, shared);
  std::string map_cube, map_library, map_soil, map_mask;
  std::optional<int> map_k;
  map->add_option("--cube", map_cube, "ENVI header of the input cube");
  map->add_option("--library", map_library, "laboratory signature CSV");
  map->add_option("--soil-class", map_soil, "soil class: id, class_N, or a class_names entry");
  map->add_option("--k-override", map_k, "skip the elbow rule and use this K")->check(CLI::PositiveNumber);
  map->add_option("--band-mask", map_mask, "bands to drop, e.g. 0-6,57-75");
  bool map_pixel_csv = false;
  map->add_flag("--pixel-csv", map_pixel_csv, "also write per-pixel results to pixels.csv");

  auto* report = app.add_subcommand("report", "correlate maps with ground-truth sites");
  add_shared(report, shared);
  std::string report_sites, report_ra, report_alpha;
  report->add_option("--sites", report_sites, "CSV: site_id,row,col,ground_truth_pct")->required();
  report->add_option("--ra", report_ra, "relative availability raster header")->required();
  report->add_option("--alpha", report_alpha, "abundance raster header")->required();

  auto* synth = app.add_subcommand("synth", "write a synthetic test scene");
  add_shared(synth, shared);
  std::optional<double> synth_snr;
  synth->add_option("--snr-db", synth_snr, "noise level (inf = noiseless)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lithomap::kExitUsage;
  }

  auto& out = std::cout;
  auto& err = std::cerr;

  if (*convert) {
    return lithomap::guarded(
        [&] {
          lithomap::ConvertOptions o;
          o.input = convert_in;
          o.radiometric = convert_params.empty() ? shared.config : convert_params;
          if (o.radiometric.empty()) throw lithomap::Error(lithomap::ErrorCode::InvalidConfig, "--params is required");
          o.output = !convert_output.empty() ? std::filesystem::path(convert_output)
                                             : std::filesystem::path(shared.out.empty() ? "." : shared.out) /
                                                   "reflectance.hdr";
          o.band_mask = convert_mask;
          o.threads = shared.threads.value_or(1);
          return lithomap::cmd_convert(o, out, err);
        },
        err);
  }

  if (*map) {
    return lithomap::guarded(
        [&] {
          auto cfg = lithomap::PipelineConfig::from_config(load_config(shared.config));
          if (shared.seed) cfg.seed = *shared.seed;
          if (shared.threads) cfg.threads = *shared.threads;
          if (!shared.out.empty()) cfg.output_dir = shared.out;
          if (!map_cube.empty()) cfg.cube = map_cube;
          if (!map_library.empty()) cfg.library = map_library;
          if (!map_soil.empty()) cfg.soil_class = map_soil;
          if (map_k) cfg.k_override = *map_k;
          if (!map_mask.empty()) cfg.band_mask = map_mask;
          if (map_pixel_csv) cfg.pixel_csv = true;
          return lithomap::cmd_map(cfg, out, err);
        },
        err);
  }

  if (*report) {
    lithomap::ReportOptions o;
    o.sites = report_sites;
    o.ra = report_ra;
    o.alpha = report_alpha;
    o.output_dir = shared.out;
    return lithomap::cmd_report(o, out, err);
  }

  return lithomap::guarded(
      [&] {
        auto spec = lithomap::SceneSpec::from_config(load_config(shared.config));
        if (shared.seed) spec.seed = *shared.seed;
        if (synth_snr) spec.snr_db = *synth_snr;
        spec.validate();
        return lithomap::cmd_synth(spec, shared.out.empty() ? "." : shared.out, out, err);
      },
      err);
}
