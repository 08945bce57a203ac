#pragma once

#include <cstdint>
#include <vector>

#include "lithomap/core.hpp"

namespace lithomap {

/// Correlation bounds taken from the two soil endmembers.
struct SubclassThresholds {
  double lower = 0.0;       ///< impurity bound, min of the two correlations
  double upper = 0.0;       ///< mineral bound, max of the two correlations
  double corr_rep_1 = 0.0;
  double corr_rep_2 = 0.0;
  PixelMatrix endmembers;   ///< the two extracted soil endmembers, L2-normalized
};

enum class Subclass : std::uint8_t { Impurity = 0, Middle = 1, Mineral = 2 };

struct SubclassMap {
  std::vector<Subclass> labels;      ///< one per soil pixel
  std::vector<double> correlations;  ///< r_k per soil pixel; NaN for constant pixels

  std::size_t count(Subclass s) const;
};

/// Pearson correlation of every soil pixel (column) with the laboratory
/// signature. Constant pixels get NaN and end up in the middle band.
std::vector<double> correlate_soil(const PixelMatrix& soil_pixels, const SpectrumRef& lab_signature,
                                   int threads = 1);

/// Two-endmember VCA on the soil pixels; the endmembers' correlations with
/// the laboratory signature become the lower/upper bounds.
SubclassThresholds derive_thresholds(const PixelMatrix& soil_pixels, const SpectrumRef& lab_signature,
                                     std::uint64_t seed);

/// r > upper -> mineral, r < lower -> impurity, otherwise middle.
SubclassMap label_subclasses(const std::vector<double>& correlations, const SubclassThresholds& thresholds);

struct RepresentativePair {
  Spectrum mineral;
  Spectrum impurity;
  Provenance source = Provenance::SubclassMean;
  std::size_t mineral_count = 0;
  std::size_t impurity_count = 0;
};

/// Band-wise means of the mineral and impurity subclasses. Throws
/// EmptySubclass naming the empty side.
RepresentativePair mean_representatives(const PixelMatrix& soil_pixels, const SubclassMap& map);

/// Columns of `pixels` whose label equals `which`.
PixelMatrix select_subclass(const PixelMatrix& pixels, const SubclassMap& map, Subclass which);

}  // namespace lithomap
