#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lithomap/core.hpp"
#include "lithomap/cube.hpp"
#include "lithomap/envi.hpp"
#include "lithomap/keyvalue.hpp"

namespace lithomap {

/// Scene geometry and per-band calibration constants for the
/// radiance to top-of-atmosphere reflectance conversion.
struct RadiometricParams {
  double earth_sun_distance = 1.0;   ///< astronomical units
  double solar_zenith_deg = 0.0;
  std::vector<double> esun;          ///< W m^-2 um^-1, per band
  std::vector<double> radiance_scale;  ///< stored value / scale = radiance

  void validate(const std::vector<std::uint8_t>& band_mask) const;
};

/// rho = pi * L * d^2 / (ESUN * cos(theta_s)).
double toa_reflectance(double radiance, double esun, double earth_sun_distance, double solar_zenith_deg);

struct ReflectanceResult {
  HyperspectralCube cube;
  std::size_t clamped_count = 0;  ///< negative reflectances set to zero
};

/// Band-wise conversion of a radiance cube. Masked-out bands are zeroed.
ReflectanceResult to_reflectance(const HyperspectralCube& radiance, const RadiometricParams& params, int threads = 1);

/// Reads `earth_sun_distance`, `solar_zenith_deg`, `radiance_scale`
/// (RANGE:VALUE list, 0-based) and `esun_file` (CSV band,esun, resolved
/// relative to the parameter file).
RadiometricParams load_radiometric_params(const std::filesystem::path& path, std::size_t bands);

/// Expand "0-69:40,70-241:80" into one value per band (unlisted bands = 0).
std::vector<double> expand_band_values(const std::string& spec, std::size_t bands, const std::string& what);

struct LibraryLoad {
  SpectralSignature signature;
  std::size_t dropped_rows = 0;
};

/// CSV with header `wavelength_um,reflectance`. Rows with unparsable or
/// non-finite fields are dropped and counted.
LibraryLoad load_library_signature(const std::filesystem::path& csv_path);

void write_library_csv(const std::filesystem::path& path, const SpectralSignature& sig);

/// Wide CSV: wavelength_um then one column per signature label.
void write_signatures_csv(const std::filesystem::path& path, std::span<const SpectralSignature> signatures);

/// Inclusive 0-based band range.
struct BandRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

BandRange parse_band_range(const std::string& text);

/// Parse "0-6,57-75,224-241" into sorted, merged ranges.
std::vector<BandRange> parse_band_mask_spec(const std::string& spec);

/// Drop the listed bands from downstream math and refresh pixel validity.
void apply_band_mask(HyperspectralCube& cube, const std::string& spec);

/// Inverse of parse_band_mask_spec for the dropped bands of a mask.
std::string band_mask_spec(const std::vector<std::uint8_t>& mask);

}  // namespace lithomap
