#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lithomap/core.hpp"

namespace lithomap {

enum class Units { Radiance, Reflectance };
enum class SampleType { Int16, Float32 };

/// Pixel-interleaved (BIP) cube: sample (row, col, band) lives at
/// ((row * cols) + col) * bands + band. Integer inputs are kept as their
/// stored values until radiometric conversion.
struct HyperspectralCube {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  std::vector<double> wavelengths;
  std::vector<float> data;
  Units units = Units::Reflectance;
  SampleType sample_type = SampleType::Float32;
  std::vector<std::uint8_t> band_mask;   ///< 1 = usable
  std::vector<std::uint8_t> valid_mask;  ///< 1 = valid pixel

  HyperspectralCube() = default;
  HyperspectralCube(std::size_t rows, std::size_t cols, std::size_t bands);

  std::size_t pixel_count() const { return rows * cols; }

  float& at(std::size_t row, std::size_t col, std::size_t band) { return data[(row * cols + col) * bands + band]; }
  float at(std::size_t row, std::size_t col, std::size_t band) const {
    return data[(row * cols + col) * bands + band];
  }

  std::span<const float> pixel(std::size_t index) const { return {data.data() + index * bands, bands}; }
  std::span<float> pixel(std::size_t index) { return {data.data() + index * bands, bands}; }

  /// Indices of bands with band_mask set, ascending.
  std::vector<std::size_t> usable_bands() const;

  /// Wavelengths of the usable bands.
  Spectrum usable_wavelengths() const;

  /// One pixel restricted to the usable bands.
  Spectrum masked_pixel(std::size_t index) const;

  /// Selected pixels restricted to the usable bands, one column each.
  PixelMatrix masked_pixels(std::span<const std::size_t> indices) const;

  /// Indices of all valid pixels in row-major order.
  std::vector<std::size_t> valid_pixels() const;

  /// Mark pixels invalid when a usable band is non-finite or all usable
  /// bands are zero (dead pixel).
  void refresh_validity();

  /// Throws on broken invariants (sizes, wavelength order, mask lengths).
  void validate() const;
};

}  // namespace lithomap
