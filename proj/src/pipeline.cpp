#include "lithomap/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "lithomap/error.hpp"
#include "lithomap/ingest.hpp"
#include "lithomap/random.hpp"

namespace lithomap {
namespace {

// Independent RNG streams per stage, derived from the run seed.
constexpr std::uint64_t kStreamElbow = 11;
constexpr std::uint64_t kStreamCandidates = 12;
constexpr std::uint64_t kStreamSoil = 13;

// Shortest of %.15g / %.17g that reads back to the same double.
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string resolve(const KeyValueFile& kv, const std::string& key) {
  const auto v = kv.get(key);
  if (!v || v->empty()) return {};
  std::filesystem::path p(*v);
  if (p.is_relative() && !kv.base_dir().empty()) p = kv.base_dir() / p;
  return p.lexically_normal().string();
}

std::string hex(const unsigned char* data, unsigned int n) {
  static const char* digits = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (unsigned int i = 0; i < n; ++i) {
    out[2 * i] = digits[data[i] >> 4];
    out[2 * i + 1] = digits[data[i] & 0xF];
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorCode::IoFailure, "SHA-256 unavailable");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_DigestFinal_ex(ctx_, md, &n);
    return hex(md, n);
  }

 private:
  EVP_MD_CTX* ctx_;
};

class StageClock {
 public:
  StageClock(MapResult& result, const StageHook& hook) : result_(result), hook_(hook) {}

  template <typename Fn>
  void run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + stage + ": " + e.message());
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    result_.timings.push_back({stage, dt.count()});
    if (hook_) hook_(stage, result_);
  }

 private:
  MapResult& result_;
  const StageHook& hook_;
};

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (k_max < 3) fail("k_max must be at least 3 for the elbow rule");
  if (k_override && *k_override < 1) fail("k_override must be positive");
  if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0)) fail("similarity_threshold must lie in (0, 1)");
  if (!(ra_low >= 0.0 && ra_low < ra_high && ra_high <= 1.0)) fail("need 0 <= ra_low < ra_high <= 1");
  if (restarts < 1) fail("restarts must be positive");
  if (threads < 1) fail("threads must be positive");
  if (soil_class.empty()) fail("soil_class is required (class id, class_N, or a class_names entry)");
}

PipelineConfig PipelineConfig::from_config(const KeyValueFile& kv) {
  PipelineConfig c;
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.seed)));
  c.k_max = static_cast<int>(kv.get_int("k_max", c.k_max));
  if (const auto v = kv.get("k_override"); v && !trim(*v).empty()) {
    c.k_override = static_cast<int>(parse_int(*v, "k_override"));
  }
  c.similarity_threshold = kv.get_double("similarity_threshold", c.similarity_threshold);
  c.ra_high = kv.get_double("ra_high", c.ra_high);
  c.ra_low = kv.get_double("ra_low", c.ra_low);
  c.restarts = static_cast<int>(kv.get_int("restarts", c.restarts));
  c.band_mask = kv.get_string("band_mask", "");
  c.cube = resolve(kv, "cube");
  c.radiometric = resolve(kv, "radiometric");
  c.library = resolve(kv, "library");
  c.soil_class = kv.get_string("soil_class", "");
  if (const auto v = kv.get("class_names")) {
    for (const auto& name : split(*v, ',')) {
      if (!trim(name).empty()) c.class_names.push_back(trim(name));
    }
  }
  if (kv.contains("output_dir")) c.output_dir = resolve(kv, "output_dir");
  c.threads = static_cast<int>(kv.get_int("threads", c.threads));
  const std::string dump = kv.get_string("pixel_csv", "false");
  c.pixel_csv = dump == "true" || dump == "1" || dump == "yes";
  return c;
}

std::string PipelineConfig::canonical() const {
  KeyValueFile kv;
  kv.set("seed", std::to_string(seed));
  kv.set("k_max", std::to_string(k_max));
  kv.set("k_override", k_override ? std::to_string(*k_override) : "");
  kv.set("similarity_threshold", format_double(similarity_threshold));
  kv.set("ra_high", format_double(ra_high));
  kv.set("ra_low", format_double(ra_low));
  kv.set("restarts", std::to_string(restarts));
  kv.set("band_mask", band_mask);
  kv.set("cube", cube.string());
  kv.set("radiometric", radiometric.string());
  kv.set("library", library.string());
  kv.set("soil_class", soil_class);
  std::string names;
  for (std::size_t i = 0; i < class_names.size(); ++i) names += (i ? "," : "") + class_names[i];
  kv.set("class_names", names);
  return kv.to_string();
}

int resolve_class(const std::string& name, const ClassMap& map) {
  const std::string key = trim(name);
  if (!key.empty() && std::all_of(key.begin(), key.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    const auto id = parse_int(key, "soil class id");
    if (id >= map.class_count()) {
      throw Error(ErrorCode::InvalidConfig,
                  "soil class " + key + " does not exist (K = " + std::to_string(map.class_count()) + ")");
    }
    return static_cast<int>(id);
  }
  for (int i = 0; i < map.class_count(); ++i) {
    if (map.class_names[static_cast<std::size_t>(i)] == key) return i;
  }
  for (int i = 0; i < map.class_count(); ++i) {
    if ("class_" + std::to_string(i) == key) return i;
  }
  std::string known;
  for (const auto& n : map.class_names) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::InvalidConfig, "unknown soil class '" + key + "' (classes: " + known + ")");
}

MapResult run_map(const PipelineConfig& config, const HyperspectralCube& reflectance,
                  const SpectralSignature& library, const StageHook& hook) {
  config.validate();
  if (reflectance.units != Units::Reflectance) {
    throw Error(ErrorCode::InvalidConfig, "mapping needs a reflectance cube; run convert first");
  }
  HyperspectralCube cube = reflectance;
  if (!config.band_mask.empty()) apply_band_mask(cube, config.band_mask);
  cube.refresh_validity();

  MapResult r;
  StageClock clock(r, hook);
  const std::vector<std::size_t> valid = cube.valid_pixels();
  PixelMatrix pixels;

  clock.run("elbow", [&] {
    if (cube.usable_bands().empty()) throw Error(ErrorCode::InvalidConfig, "band mask removes every band");
    if (valid.size() < 3) {
      throw Error(ErrorCode::TooFewPixels, std::to_string(valid.size()) + " valid pixels, need at least 3");
    }
    pixels = cube.masked_pixels(valid);
    if (config.k_override) {
      r.k = *config.k_override;
      if (static_cast<std::size_t>(r.k) > valid.size()) {
        throw Error(ErrorCode::TooFewPixels, "k_override exceeds the valid pixel count");
      }
    } else {
      r.elbow = wcss_curve(pixels, config.k_max, Rng::mix(config.seed, kStreamElbow), config.restarts,
                           config.threads);
      r.k = r.elbow.chosen_k;
    }
  });

  clock.run("preclassify", [&] {
    r.candidates = vca(pixels, r.k, Rng::mix(config.seed, kStreamCandidates));
    sort_candidates_by_brightness(r.candidates);
    for (auto& idx : r.candidates.indices) idx = static_cast<Eigen::Index>(valid[static_cast<std::size_t>(idx)]);
    r.classes = similarity_assign(cube, r.candidates.endmembers, config.similarity_threshold, config.threads);
    for (std::size_t i = 0; i < config.class_names.size() && i < r.classes.class_names.size(); ++i) {
      r.classes.class_names[i] = config.class_names[i];
      r.classes.class_means[i].label = config.class_names[i];
    }
  });
  pixels.resize(0, 0);

  clock.run("soil", [&] {
    r.soil_class = resolve_class(config.soil_class, r.classes);
    try {
      r.soil = isolate_class(cube, r.classes, r.soil_class);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyClass) throw;
      throw Error(ErrorCode::EmptyClass,
                  "soil class '" + r.classes.class_names[static_cast<std::size_t>(r.soil_class)] + "' is empty");
    }
    r.lab = resample_to_grid(library, cube.usable_wavelengths());
    r.lab.provenance = Provenance::Library;
  });

  clock.run("subclass", [&] {
    r.thresholds = derive_thresholds(r.soil.pixels, r.lab.values, Rng::mix(config.seed, kStreamSoil));
    r.correlations = correlate_soil(r.soil.pixels, r.lab.values, config.threads);
    r.subclasses = label_subclasses(r.correlations, r.thresholds);
    r.initial = mean_representatives(r.soil.pixels, r.subclasses);
  });

  clock.run("project", [&] {
    r.direction = fisher_direction(select_subclass(r.soil.pixels, r.subclasses, Subclass::Mineral),
                                   select_subclass(r.soil.pixels, r.subclasses, Subclass::Impurity));
    r.projections = project_soil(r.soil.pixels, r.initial, r.direction, config.threads);
    r.separation = separation_report(r.projections, r.subclasses);
    r.ra_map.assign(cube.pixel_count(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < r.soil.indices.size(); ++k) r.ra_map[r.soil.indices[k]] = r.projections[k].ra;
  });

  clock.run("unmix", [&] {
    std::vector<double> ra(r.projections.size());
    for (std::size_t k = 0; k < ra.size(); ++k) ra[k] = r.projections[k].ra;
    r.refined = refine_representatives(r.soil.pixels, ra, config.ra_high, config.ra_low);
    MixtureModel model;
    model.mineral = r.refined.mineral;
    model.impurity = r.refined.impurity;
    model.ra_high = config.ra_high;
    model.ra_low = config.ra_low;
    model.validate();
    r.abundance = abundance_map(r.soil.pixels, r.soil.indices, cube.rows, cube.cols, model, config.threads);
  });
  return r;
}

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.finish();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.finish();
}

}  // namespace lithomap
