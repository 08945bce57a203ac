#include "lithomap/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "lithomap/envi.hpp"
#include "lithomap/error.hpp"
#include "lithomap/ingest.hpp"
#include "lithomap/raster_io.hpp"
#include "lithomap/report.hpp"

namespace lithomap {
namespace {

using nlohmann::ordered_json;

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

ordered_json file_entry(const std::filesystem::path& path) {
  return ordered_json{{"path", path.string()}, {"sha256", sha256_file(path)}};
}

ordered_json nullable(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string stage_of(const std::string& message) {
  const std::string prefix = "stage ";
  if (message.rfind(prefix, 0) != 0) return "load";
  const auto colon = message.find(':');
  return message.substr(prefix.size(), colon - prefix.size());
}

// Builds the manifest incrementally so a failed run still records what
// finished. Timings live under their own key so determinism checks can
// drop them.
class ManifestWriter {
 public:
  ManifestWriter(const PipelineConfig& config, std::filesystem::path path) : path_(std::move(path)) {
    const std::string canonical = config.canonical();
    ordered_json cfg = ordered_json::object();
    for (const auto& line : split(canonical, '\n')) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    doc_["tool"] = "lithomap";
    doc_["status"] = "running";
    doc_["config"] = cfg;
    doc_["config_sha256"] = sha256_hex(canonical);
    doc_["seed"] = config.seed;
    doc_["inputs"] = ordered_json::object();
    doc_["stages_completed"] = ordered_json::array();
    doc_["outputs"] = ordered_json::array();
    doc_["timings"] = ordered_json::object();
  }

  ordered_json& doc() { return doc_; }

  void output(const std::string& name) { doc_["outputs"].push_back(name); }

  void stage(const std::string& name, double seconds) {
    doc_["stages_completed"].push_back(name);
    doc_["timings"][name] = seconds;
  }

  void save() const {
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path_.string());
    out << doc_.dump(2) << '\n';
  }

 private:
  std::filesystem::path path_;
  ordered_json doc_;
};

void write_class_sidecar(const ClassMap& m, const std::filesystem::path& path) {
  ordered_json doc = ordered_json::object();
  doc["unassigned"] = kRasterUnassigned;
  doc["invalid"] = kRasterNoData;
  ordered_json classes = ordered_json::object();
  for (int c = 0; c < m.class_count(); ++c) classes[std::to_string(c)] = m.class_names[static_cast<std::size_t>(c)];
  doc["classes"] = classes;
  std::ofstream out(path, std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

void write_threshold_csv(const MapResult& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out.precision(17);
  out << "key,value\n"
      << "c1_upper," << r.thresholds.upper << "\n"
      << "c2_lower," << r.thresholds.lower << "\n"
      << "corr_rep_1," << r.thresholds.corr_rep_1 << "\n"
      << "corr_rep_2," << r.thresholds.corr_rep_2 << "\n"
      << "mineral_count," << r.subclasses.count(Subclass::Mineral) << "\n"
      << "middle_count," << r.subclasses.count(Subclass::Middle) << "\n"
      << "impurity_count," << r.subclasses.count(Subclass::Impurity) << "\n";
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

void write_pixel_csv(const MapResult& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out.precision(10);
  out << "row,col,subclass,correlation,ra,alpha,residual\n";
  const std::size_t cols = r.classes.cols;
  for (std::size_t k = 0; k < r.soil.indices.size(); ++k) {
    const std::size_t idx = r.soil.indices[k];
    out << idx / cols << ',' << idx % cols << ',' << static_cast<int>(r.subclasses.labels[k]) << ','
        << r.correlations[k] << ',' << r.projections[k].ra << ',' << r.abundance.alpha[idx] << ','
        << r.abundance.residual[idx] << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

void record_stage(const std::string& stage, const MapResult& r, const std::filesystem::path& dir,
                  ManifestWriter& manifest, bool pixel_csv) {
  ordered_json& doc = manifest.doc();
  if (stage == "elbow") {
    doc["k"] = r.k;
    ordered_json elbow = ordered_json::object();
    elbow["k_values"] = r.elbow.k_values;
    elbow["wcss"] = r.elbow.wcss;
    elbow["chosen_k"] = r.elbow.k_values.empty() ? ordered_json(nullptr) : ordered_json(r.elbow.chosen_k);
    elbow["degenerate"] = r.elbow.degenerate;
    doc["elbow"] = elbow;
  } else if (stage == "preclassify") {
    const ClassMap& m = r.classes;
    ordered_json classes = ordered_json::array();
    for (int c = 0; c < m.class_count(); ++c) {
      const auto i = static_cast<std::size_t>(c);
      const auto px = static_cast<std::size_t>(r.candidates.indices[i]);
      classes.push_back({{"id", c},
                         {"name", m.class_names[i]},
                         {"count", m.class_counts[i]},
                         {"candidate_row", px / m.cols},
                         {"candidate_col", px % m.cols}});
    }
    std::size_t invalid = 0;
    for (int label : m.labels) invalid += label == kInvalidPixel ? 1 : 0;
    doc["classes"] = classes;
    doc["unassigned_pixels"] = m.unassigned_count();
    doc["invalid_pixels"] = invalid;
    doc["candidate_snr_db"] = nullable(r.candidates.snr_db);
    write_raster_pair(class_map_raster(m), dir, "class_map");
    write_class_sidecar(m, dir / "class_map.json");
    manifest.output("class_map.hdr");
    manifest.output("class_map.json");
  } else if (stage == "soil") {
    doc["soil_class"] = {{"id", r.soil_class},
                         {"name", r.classes.class_names[static_cast<std::size_t>(r.soil_class)]},
                         {"pixels", r.soil.indices.size()}};
  } else if (stage == "subclass") {
    const SubclassThresholds& t = r.thresholds;
    doc["thresholds"] = {{"c1_upper", t.upper}, {"c2_lower", t.lower},
                         {"corr_rep_1", t.corr_rep_1}, {"corr_rep_2", t.corr_rep_2}};
    doc["subclass_counts"] = {{"mineral", r.subclasses.count(Subclass::Mineral)},
                              {"middle", r.subclasses.count(Subclass::Middle)},
                              {"impurity", r.subclasses.count(Subclass::Impurity)}};
    write_raster_pair(subclass_raster(r.classes.rows, r.classes.cols, r.soil.indices, r.subclasses), dir,
                      "subclass_map");
    write_threshold_csv(r, dir / "subclass_thresholds.csv");
    manifest.output("subclass_map.hdr");
    manifest.output("subclass_thresholds.csv");
  } else if (stage == "project") {
    const SeparationReport& s = r.separation;
    doc["projection"] = {{"fisher_ratio", nullable(r.direction.fisher_ratio)},
                         {"mu_mineral_proj", r.direction.mu_mineral_proj},
                         {"mu_impurity_proj", r.direction.mu_impurity_proj},
                         {"mean_gap", nullable(s.mean_gap)},
                         {"normalized_gap", nullable(s.normalized_gap)}};
    write_raster_pair(float_map_raster(r.classes.rows, r.classes.cols, r.ra_map), dir, "ra_map");
    write_pgm(dir / "ra_map.pgm", r.classes.rows, r.classes.cols, r.ra_map, 0.0, 1.0);
    manifest.output("ra_map.hdr");
    manifest.output("ra_map.pgm");
  } else if (stage == "unmix") {
    double sum = 0.0;
    std::size_t n = 0;
    for (double a : r.abundance.alpha) {
      if (std::isfinite(a)) {
        sum += a;
        ++n;
      }
    }
    doc["unmix"] = {{"refined_mineral_pixels", r.refined.mineral_count},
                    {"refined_impurity_pixels", r.refined.impurity_count},
                    {"mean_alpha", n ? ordered_json(sum / static_cast<double>(n)) : ordered_json(nullptr)}};
    write_raster_pair(float_map_raster(r.abundance.rows, r.abundance.cols, r.abundance.alpha), dir, "alpha_map");
    write_pgm(dir / "alpha_map.pgm", r.abundance.rows, r.abundance.cols, r.abundance.alpha, 0.0, 1.0);
    manifest.output("alpha_map.hdr");
    manifest.output("alpha_map.pgm");

    std::vector<SpectralSignature> sigs = r.classes.class_means;
    sigs.push_back(r.lab);
    auto add = [&](const Spectrum& values, const std::string& label, Provenance p) {
      SpectralSignature s;
      s.wavelengths = r.lab.wavelengths;
      s.values = values;
      s.label = label;
      s.provenance = p;
      sigs.push_back(std::move(s));
    };
    add(r.initial.mineral, "subclass_mineral", Provenance::SubclassMean);
    add(r.initial.impurity, "subclass_impurity", Provenance::SubclassMean);
    add(r.refined.mineral, "refined_mineral", Provenance::RaRefined);
    add(r.refined.impurity, "refined_impurity", Provenance::RaRefined);
    write_signatures_csv(dir / "signatures.csv", sigs);
    manifest.output("signatures.csv");
    if (pixel_csv) {
      write_pixel_csv(r, dir / "pixels.csv");
      manifest.output("pixels.csv");
    }
  }
  manifest.stage(stage, r.timings.empty() ? 0.0 : r.timings.back().seconds);
  manifest.save();
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error [" << error_name(e.code()) << "]: " << e.message() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(ErrorCode::IoFailure);
  }
}

int cmd_convert(const ConvertOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        HyperspectralCube cube = read_envi(options.input, data_path_for(options.input));
        if (cube.units == Units::Reflectance) {
          throw Error(ErrorCode::AlreadyReflectance, options.input.string() + " is already reflectance");
        }
        if (!options.band_mask.empty()) apply_band_mask(cube, options.band_mask);
        const RadiometricParams params = load_radiometric_params(options.radiometric, cube.bands);
        const ReflectanceResult result = to_reflectance(cube, params, options.threads);
        if (options.output.has_parent_path()) ensure_dir(options.output.parent_path());
        write_envi(result.cube, options.output, data_path_for(options.output));
        out << "wrote " << options.output.string() << " (" << result.cube.rows << "x" << result.cube.cols << "x"
            << result.cube.bands << ", " << result.cube.usable_bands().size() << " usable bands)\n";
        out << "negative reflectances clamped to 0: " << result.clamped_count << '\n';
        return kExitOk;
      },
      err);
}

int cmd_map(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        config.validate();
        if (config.cube.empty()) throw Error(ErrorCode::InvalidConfig, "no input cube (config key 'cube')");
        if (config.library.empty()) throw Error(ErrorCode::InvalidConfig, "no library signature (key 'library')");
        ensure_dir(config.output_dir);
        ManifestWriter manifest(config, config.output_dir / "manifest.json");
        auto fail = [&](const Error& e) {
          manifest.doc()["status"] = "failed";
          manifest.doc()["error"] = {{"stage", stage_of(e.message())},
                                     {"code", std::string(error_name(e.code()))},
                                     {"message", e.message()}};
          manifest.save();
          throw e;
        };
        try {
          const auto data = data_path_for(config.cube);
          manifest.doc()["inputs"]["cube_header"] = file_entry(config.cube);
          manifest.doc()["inputs"]["cube_data"] = file_entry(data);
          manifest.doc()["inputs"]["library"] = file_entry(config.library);
          HyperspectralCube cube = read_envi(config.cube, data);
          if (cube.units == Units::Radiance) {
            if (config.radiometric.empty()) {
              throw Error(ErrorCode::InvalidConfig, "input is radiance; set 'radiometric' or run convert first");
            }
            manifest.doc()["inputs"]["radiometric"] = file_entry(config.radiometric);
            ReflectanceResult conv =
                to_reflectance(cube, load_radiometric_params(config.radiometric, cube.bands), config.threads);
            manifest.doc()["clamped_reflectances"] = conv.clamped_count;
            cube = std::move(conv.cube);
          }
          const LibraryLoad lib = load_library_signature(config.library);
          manifest.doc()["library_dropped_rows"] = lib.dropped_rows;

          const MapResult r = run_map(config, cube, lib.signature,
                                      [&](const std::string& stage, const MapResult& partial) {
                                        record_stage(stage, partial, config.output_dir, manifest, config.pixel_csv);
                                      });
          manifest.doc()["status"] = "ok";
          manifest.save();

          out << "K = " << r.k << (r.elbow.k_values.empty() ? " (override)" : " (elbow)") << '\n';
          for (int c = 0; c < r.classes.class_count(); ++c) {
            out << "  class " << c << " " << r.classes.class_names[static_cast<std::size_t>(c)] << ": "
                << r.classes.class_counts[static_cast<std::size_t>(c)] << " px\n";
          }
          out << "  unassigned: " << r.classes.unassigned_count() << " px\n";
          out << "soil pixels: " << r.soil.indices.size() << "; C1 = " << r.thresholds.upper
              << ", C2 = " << r.thresholds.lower << '\n';
          out << "subclasses: mineral " << r.subclasses.count(Subclass::Mineral) << ", middle "
              << r.subclasses.count(Subclass::Middle) << ", impurity " << r.subclasses.count(Subclass::Impurity)
              << '\n';
          out << "projected gap: " << r.separation.mean_gap << " (normalized " << r.separation.normalized_gap
              << ")\n";
          out << "refined representatives: " << r.refined.mineral_count << " high, " << r.refined.impurity_count
              << " low\n";
          out << "outputs in " << config.output_dir.string() << '\n';
        } catch (const Error& e) {
          fail(e);
        }
        return kExitOk;
      },
      err);
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const std::vector<Site> sites = read_sites(options.sites);
        const Raster ra = read_raster(options.ra, data_path_for(options.ra));
        const Raster alpha = read_raster(options.alpha, data_path_for(options.alpha));
        const SiteReport report = build_site_report(sites, ra, alpha);
        for (const auto& row : report.rows) {
          if (!row.used) err << "warning: site " << row.site_id << " skipped: " << row.warning << '\n';
        }
        print_site_report(out, report);
        if (!options.output_dir.empty()) {
          ensure_dir(options.output_dir);
          write_site_report_csv(options.output_dir / "site_report.csv", report);
        }
        return kExitOk;
      },
      err);
}

int cmd_synth(const SceneSpec& spec, const std::filesystem::path& output_dir, std::ostream& out,
              std::ostream& err) {
  return guarded(
      [&] {
        const Scene scene = generate_scene(spec);
        ensure_dir(output_dir);
        write_envi(scene.cube, output_dir / "scene.hdr", output_dir / "scene.img");
        write_raster_pair(class_map_raster(scene.truth), output_dir, "truth_classes");
        write_raster_pair(float_map_raster(spec.rows, spec.cols, scene.alpha), output_dir, "truth_alpha");
        SpectralSignature lab;
        lab.wavelengths = scene.generators.wavelengths;
        lab.values = scene.generators.lab;
        lab.label = "lab";
        lab.provenance = Provenance::Library;
        write_library_csv(output_dir / "lab.csv", lab);

        // Class ids follow candidate brightness: water < soil < vegetation.
        std::ofstream cfg(output_dir / "map.cfg", std::ios::trunc);
        cfg << "# generated by lithomap synth\n"
            << "cube = scene.hdr\n"
            << "library = lab.csv\n"
            << "class_names = water, soil, vegetation\n"
            << "soil_class = soil\n"
            << "seed = " << spec.seed << "\n"
            << "output_dir = map\n";
        if (!cfg) throw Error(ErrorCode::IoFailure, "cannot write map.cfg");
        out << "wrote " << spec.rows << "x" << spec.cols << "x" << spec.bands << " scene to " << output_dir.string()
            << " (" << scene.soil_indices().size() << " soil pixels)\n";
        return kExitOk;
      },
      err);
}

}  // namespace lithomap
