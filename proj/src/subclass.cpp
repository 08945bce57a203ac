#include "lithomap/subclass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lithomap/error.hpp"
#include "lithomap/preclassify.hpp"

namespace lithomap {

std::size_t SubclassMap::count(Subclass s) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), s));
}

std::vector<double> correlate_soil(const PixelMatrix& soil_pixels, const SpectrumRef& lab_signature, int threads) {
  if (soil_pixels.rows() != lab_signature.size()) {
    throw Error(ErrorCode::GridMismatch, "laboratory signature has " + std::to_string(lab_signature.size()) +
                                             " bands, soil pixels have " + std::to_string(soil_pixels.rows()));
  }
  std::vector<double> r(static_cast<std::size_t>(soil_pixels.cols()), std::numeric_limits<double>::quiet_NaN());
  parallel_for(r.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      try {
        r[j] = pearson_correlation(soil_pixels.col(static_cast<Eigen::Index>(j)), lab_signature);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVariance) throw;
      }
    }
  });
  return r;
}

SubclassThresholds derive_thresholds(const PixelMatrix& soil_pixels, const SpectrumRef& lab_signature,
                                     std::uint64_t seed) {
  if (soil_pixels.rows() != lab_signature.size()) {
    throw Error(ErrorCode::GridMismatch, "laboratory signature and soil pixels differ in band count");
  }
  const VcaResult extracted = vca(soil_pixels, 2, seed);
  SubclassThresholds t;
  t.endmembers.resize(soil_pixels.rows(), 2);
  t.endmembers.col(0) = l2_normalize(extracted.endmembers.col(0));
  t.endmembers.col(1) = l2_normalize(extracted.endmembers.col(1));
  t.corr_rep_1 = pearson_correlation(t.endmembers.col(0), lab_signature);
  t.corr_rep_2 = pearson_correlation(t.endmembers.col(1), lab_signature);
  t.lower = std::min(t.corr_rep_1, t.corr_rep_2);
  t.upper = std::max(t.corr_rep_1, t.corr_rep_2);
  return t;
}

SubclassMap label_subclasses(const std::vector<double>& correlations, const SubclassThresholds& thresholds) {
  if (!(thresholds.lower <= thresholds.upper)) {
    throw Error(ErrorCode::InvalidConfig, "lower correlation bound exceeds upper bound");
  }
  SubclassMap map;
  map.correlations = correlations;
  map.labels.reserve(correlations.size());
  for (double r : correlations) {
    if (r > thresholds.upper) {
      map.labels.push_back(Subclass::Mineral);
    } else if (r < thresholds.lower) {
      map.labels.push_back(Subclass::Impurity);
    } else {
      map.labels.push_back(Subclass::Middle);
    }
  }
  return map;
}

PixelMatrix select_subclass(const PixelMatrix& pixels, const SubclassMap& map, Subclass which) {
  if (static_cast<std::size_t>(pixels.cols()) != map.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "subclass map and pixel set differ in size");
  }
  const auto n = static_cast<Eigen::Index>(map.count(which));
  PixelMatrix out(pixels.rows(), n);
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < map.labels.size(); ++j) {
    if (map.labels[j] == which) out.col(k++) = pixels.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

RepresentativePair mean_representatives(const PixelMatrix& soil_pixels, const SubclassMap& map) {
  const PixelMatrix mineral = select_subclass(soil_pixels, map, Subclass::Mineral);
  const PixelMatrix impurity = select_subclass(soil_pixels, map, Subclass::Impurity);
  if (mineral.cols() == 0 && impurity.cols() == 0) {
    throw Error(ErrorCode::EmptySubclass, "mineral and impurity subclasses are both empty");
  }
  if (mineral.cols() == 0) throw Error(ErrorCode::EmptySubclass, "mineral subclass is empty");
  if (impurity.cols() == 0) throw Error(ErrorCode::EmptySubclass, "impurity subclass is empty");
  RepresentativePair pair;
  pair.mineral = mineral.rowwise().mean();
  pair.impurity = impurity.rowwise().mean();
  pair.source = Provenance::SubclassMean;
  pair.mineral_count = static_cast<std::size_t>(mineral.cols());
  pair.impurity_count = static_cast<std::size_t>(impurity.cols());
  return pair;
}

}  // namespace lithomap
