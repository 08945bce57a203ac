#include "lithomap/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "lithomap/error.hpp"

namespace lithomap {

HyperspectralCube::HyperspectralCube(std::size_t r, std::size_t c, std::size_t b)
    : rows(r), cols(c), bands(b), wavelengths(b, 0.0), data(r * c * b, 0.0f), band_mask(b, 1), valid_mask(r * c, 1) {}

std::vector<std::size_t> HyperspectralCube::usable_bands() const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < bands; ++b) {
    if (band_mask[b]) out.push_back(b);
  }
  return out;
}

Spectrum HyperspectralCube::usable_wavelengths() const {
  const auto usable = usable_bands();
  Spectrum w(static_cast<Eigen::Index>(usable.size()));
  for (std::size_t i = 0; i < usable.size(); ++i) w[static_cast<Eigen::Index>(i)] = wavelengths[usable[i]];
  return w;
}

Spectrum HyperspectralCube::masked_pixel(std::size_t index) const {
  const auto usable = usable_bands();
  Spectrum v(static_cast<Eigen::Index>(usable.size()));
  const auto px = pixel(index);
  for (std::size_t i = 0; i < usable.size(); ++i) v[static_cast<Eigen::Index>(i)] = px[usable[i]];
  return v;
}

PixelMatrix HyperspectralCube::masked_pixels(std::span<const std::size_t> indices) const {
  const auto usable = usable_bands();
  PixelMatrix m(static_cast<Eigen::Index>(usable.size()), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto px = pixel(indices[j]);
    for (std::size_t i = 0; i < usable.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = px[usable[i]];
    }
  }
  return m;
}

std::vector<std::size_t> HyperspectralCube::valid_pixels() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    if (valid_mask[i]) out.push_back(i);
  }
  return out;
}

void HyperspectralCube::refresh_validity() {
  const auto usable = usable_bands();
  valid_mask.assign(pixel_count(), 1);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    const auto px = pixel(i);
    bool any_nonzero = false;
    bool finite = true;
    for (auto b : usable) {
      if (!std::isfinite(px[b])) finite = false;
      if (px[b] != 0.0f) any_nonzero = true;
    }
    valid_mask[i] = (finite && any_nonzero) ? 1 : 0;
  }
}

void HyperspectralCube::validate() const {
  if (data.size() != rows * cols * bands) {
    throw Error(ErrorCode::SizeMismatch, "cube data holds " + std::to_string(data.size()) + " samples, expected " +
                                             std::to_string(rows * cols * bands));
  }
  if (wavelengths.size() != bands || band_mask.size() != bands) {
    throw Error(ErrorCode::LengthMismatch, "wavelength or band mask length differs from band count");
  }
  if (valid_mask.size() != rows * cols) {
    throw Error(ErrorCode::LengthMismatch, "valid mask length differs from pixel count");
  }
  for (std::size_t b = 1; b < bands; ++b) {
    if (!(wavelengths[b] > wavelengths[b - 1])) {
      throw Error(ErrorCode::NonMonotonicWavelengths, "cube wavelengths not ascending at band " + std::to_string(b));
    }
  }
}

// ---------------------------------------------------------------------------
// Radiometry

void RadiometricParams::validate(const std::vector<std::uint8_t>& band_mask) const {
  if (!(solar_zenith_deg >= 0.0 && solar_zenith_deg < 90.0)) {
    throw Error(ErrorCode::SunBelowHorizon, "solar zenith " + std::to_string(solar_zenith_deg) + " deg");
  }
  if (!(earth_sun_distance > 0.9 && earth_sun_distance < 1.1)) {
    throw Error(ErrorCode::InvalidConfig, "earth-sun distance " + std::to_string(earth_sun_distance) +
                                              " AU outside (0.9, 1.1)");
  }
  for (std::size_t b = 0; b < band_mask.size(); ++b) {
    if (!band_mask[b]) continue;
    if (b >= esun.size() || !(esun[b] > 0.0)) {
      throw Error(ErrorCode::MissingEsun, "no positive ESUN for usable band " + std::to_string(b));
    }
    if (b >= radiance_scale.size() || !(radiance_scale[b] > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "no positive radiance scale for band " + std::to_string(b));
    }
  }
}

double toa_reflectance(double radiance, double esun, double earth_sun_distance, double solar_zenith_deg) {
  const double cos_zenith = std::cos(solar_zenith_deg * std::numbers::pi / 180.0);
  return std::numbers::pi * radiance * earth_sun_distance * earth_sun_distance / (esun * cos_zenith);
}

ReflectanceResult to_reflectance(const HyperspectralCube& radiance, const RadiometricParams& params, int threads) {
  if (radiance.units != Units::Radiance) {
    throw Error(ErrorCode::AlreadyReflectance, "cube is already reflectance");
  }
  params.validate(radiance.band_mask);
  ReflectanceResult result;
  result.cube = radiance;
  HyperspectralCube& out = result.cube;
  out.units = Units::Reflectance;
  out.sample_type = SampleType::Float32;

  // per band constant: rho = L * gain
  std::vector<double> gain(radiance.bands, 0.0);
  for (std::size_t b = 0; b < radiance.bands; ++b) {
    if (!radiance.band_mask[b]) continue;
    gain[b] = toa_reflectance(1.0 / params.radiance_scale[b], params.esun[b], params.earth_sun_distance,
                              params.solar_zenith_deg);
  }
  const std::size_t n = radiance.pixel_count();
  std::vector<std::size_t> clamped(n, 0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto px = out.pixel(i);
      for (std::size_t b = 0; b < radiance.bands; ++b) {
        if (!radiance.band_mask[b]) {
          px[b] = 0.0f;
          continue;
        }
        double rho = static_cast<double>(px[b]) * gain[b];
        if (rho < 0.0) {
          rho = 0.0;
          ++clamped[i];
        }
        px[b] = static_cast<float>(rho);
      }
    }
  });
  for (auto c : clamped) result.clamped_count += c;
  out.refresh_validity();
  return result;
}

std::vector<double> expand_band_values(const std::string& spec, std::size_t bands, const std::string& what) {
  std::vector<double> out(bands, 0.0);
  for (const auto& item : split(spec, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, what + " entry '" + item + "' is not RANGE:VALUE");
    }
    const BandRange range = parse_band_range(item.substr(0, colon));
    const double value = parse_double(item.substr(colon + 1), what);
    if (range.last >= bands) {
      throw Error(ErrorCode::RangeOutOfBounds, what + " range " + item + " exceeds " + std::to_string(bands) + " bands");
    }
    for (std::size_t b = range.first; b <= range.last; ++b) out[b] = value;
  }
  return out;
}

RadiometricParams load_radiometric_params(const std::filesystem::path& path, std::size_t bands) {
  const KeyValueFile kv = KeyValueFile::load(path);
  RadiometricParams p;
  p.earth_sun_distance = parse_double(kv.require("earth_sun_distance"), "earth_sun_distance");
  p.solar_zenith_deg = parse_double(kv.require("solar_zenith_deg"), "solar_zenith_deg");
  p.radiance_scale = expand_band_values(kv.get_string("radiance_scale", "0-" + std::to_string(bands - 1) + ":1"),
                                        bands, "radiance_scale");

  const auto esun_entry = kv.get("esun_file");
  if (!esun_entry) throw Error(ErrorCode::MissingEsun, "radiometric parameters name no esun_file");
  std::filesystem::path esun_path = *esun_entry;
  if (esun_path.is_relative()) esun_path = kv.base_dir() / esun_path;
  if (!std::filesystem::exists(esun_path)) {
    throw Error(ErrorCode::MissingEsun, "ESUN table not found: " + esun_path.string());
  }
  const CsvTable table = read_csv(esun_path);
  const std::size_t band_col = table.column("band");
  const std::size_t esun_col = table.column("esun");
  p.esun.assign(bands, 0.0);
  for (const auto& row : table.rows) {
    const auto b = parse_int(row.at(band_col), "ESUN band");
    if (b < 0 || static_cast<std::size_t>(b) >= bands) continue;
    p.esun[static_cast<std::size_t>(b)] = parse_double(row.at(esun_col), "ESUN value");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Spectral library

LibraryLoad load_library_signature(const std::filesystem::path& csv_path) {
  const CsvTable table = read_csv(csv_path);
  const std::size_t wl_col = table.column("wavelength_um");
  const std::size_t value_col = table.column("reflectance");
  std::vector<double> wl;
  std::vector<double> values;
  LibraryLoad out;
  for (const auto& row : table.rows) {
    if (row.size() <= std::max(wl_col, value_col)) {
      ++out.dropped_rows;
      continue;
    }
    double w = 0.0;
    double v = 0.0;
    try {
      w = parse_double(row[wl_col], "wavelength_um");
      v = parse_double(row[value_col], "reflectance");
    } catch (const Error&) {
      ++out.dropped_rows;
      continue;
    }
    if (!std::isfinite(w) || !std::isfinite(v)) {
      ++out.dropped_rows;
      continue;
    }
    wl.push_back(w);
    values.push_back(v);
  }
  if (wl.empty()) throw Error(ErrorCode::EmptyLibrary, "no usable rows in " + csv_path.string());
  out.signature.wavelengths = Eigen::Map<const Spectrum>(wl.data(), static_cast<Eigen::Index>(wl.size()));
  out.signature.values = Eigen::Map<const Spectrum>(values.data(), static_cast<Eigen::Index>(values.size()));
  out.signature.label = csv_path.stem().string();
  out.signature.provenance = Provenance::Library;
  out.signature.validate();
  return out;
}

void write_signatures_csv(const std::filesystem::path& path, std::span<const SpectralSignature> signatures) {
  if (signatures.empty()) throw Error(ErrorCode::InvalidConfig, "no signatures to write");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.precision(17);
  out << "wavelength_um";
  for (const auto& s : signatures) out << ',' << s.label;
  out << '\n';
  const auto n = signatures.front().wavelengths.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    out << signatures.front().wavelengths[i];
    for (const auto& s : signatures) out << ',' << s.values[i];
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

void write_library_csv(const std::filesystem::path& path, const SpectralSignature& sig) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.precision(17);
  out << "wavelength_um,reflectance\n";
  for (Eigen::Index i = 0; i < sig.values.size(); ++i) out << sig.wavelengths[i] << ',' << sig.values[i] << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// Band mask

BandRange parse_band_range(const std::string& text) {
  const std::string t = trim(text);
  const auto dash = t.find('-', 1);
  BandRange r;
  try {
    if (dash == std::string::npos) {
      r.first = r.last = static_cast<std::size_t>(std::stoull(t));
    } else {
      r.first = static_cast<std::size_t>(std::stoull(t.substr(0, dash)));
      r.last = static_cast<std::size_t>(std::stoull(t.substr(dash + 1)));
    }
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad band range '" + text + "'");
  }
  if (t.find_first_not_of("0123456789- ") != std::string::npos || r.last < r.first) {
    throw Error(ErrorCode::InvalidConfig, "bad band range '" + text + "'");
  }
  return r;
}

std::vector<BandRange> parse_band_mask_spec(const std::string& spec) {
  std::vector<BandRange> ranges;
  for (const auto& item : split(spec, ',')) {
    if (item.empty()) continue;
    ranges.push_back(parse_band_range(item));
  }
  std::sort(ranges.begin(), ranges.end(), [](const BandRange& a, const BandRange& b) { return a.first < b.first; });
  std::vector<BandRange> merged;
  for (const auto& r : ranges) {
    if (!merged.empty() && r.first <= merged.back().last + 1) {
      merged.back().last = std::max(merged.back().last, r.last);
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

void apply_band_mask(HyperspectralCube& cube, const std::string& spec) {
  const auto ranges = parse_band_mask_spec(spec);
  for (const auto& r : ranges) {
    if (r.last >= cube.bands) {
      throw Error(ErrorCode::RangeOutOfBounds, "band range " + std::to_string(r.first) + "-" +
                                                   std::to_string(r.last) + " exceeds " +
                                                   std::to_string(cube.bands) + " bands");
    }
  }
  for (const auto& r : ranges) {
    for (std::size_t b = r.first; b <= r.last; ++b) cube.band_mask[b] = 0;
  }
  cube.refresh_validity();
}

std::string band_mask_spec(const std::vector<std::uint8_t>& mask) {
  std::string out;
  std::size_t b = 0;
  while (b < mask.size()) {
    if (mask[b]) {
      ++b;
      continue;
    }
    std::size_t e = b;
    while (e + 1 < mask.size() && !mask[e + 1]) ++e;
    if (!out.empty()) out += ',';
    out += std::to_string(b);
    if (e > b) out += "-" + std::to_string(e);
    b = e + 1;
  }
  return out;
}

}  // namespace lithomap
