#pragma once

#include <cstddef>
#include <vector>

#include "lithomap/core.hpp"
#include "lithomap/subclass.hpp"

namespace lithomap {

/// Two-column linear mixture: s = alpha * mineral + (1 - alpha) * impurity.
struct MixtureModel {
  Spectrum mineral;
  Spectrum impurity;
  double ra_high = 0.8;
  double ra_low = 0.2;

  /// Throws IdenticalEndmembers / LengthMismatch / InvalidConfig.
  void validate() const;
};

/// Means of the pixels with ra > ra_high (mineral) and ra < ra_low
/// (impurity). No fallback: an empty side raises EmptyBand with counts.
RepresentativePair refine_representatives(const PixelMatrix& soil_pixels, const std::vector<double>& ra,
                                          double ra_high = 0.8, double ra_low = 0.2);

struct AlphaEstimate {
  double alpha = 0.0;
  double residual = 0.0;  ///< || alpha m + (1 - alpha) r - s ||_2
};

/// Exact minimizer of 1/2 ||A x - s||^2 subject to x >= 0, sum(x) = 1 for
/// the two-column A = [m r]: alpha = clamp((s - r).(m - r) / ||m - r||^2).
AlphaEstimate solve_alpha(const SpectrumRef& s, const MixtureModel& model);

struct AbundanceMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> alpha;     ///< NaN off the soil class
  std::vector<double> residual;  ///< NaN off the soil class
};

/// solve_alpha for each soil pixel, painted back to its raster index.
AbundanceMap abundance_map(const PixelMatrix& soil_pixels, const std::vector<std::size_t>& indices,
                           std::size_t rows, std::size_t cols, const MixtureModel& model, int threads = 1);

}  // namespace lithomap
