#include "lithomap/unmix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lithomap/error.hpp"

namespace lithomap {

void MixtureModel::validate() const {
  if (mineral.size() != impurity.size()) throw Error(ErrorCode::LengthMismatch, "mixture columns differ in length");
  if (!(ra_low < ra_high)) throw Error(ErrorCode::InvalidConfig, "ra_low must be below ra_high");
  if ((mineral - impurity).squaredNorm() == 0.0) {
    throw Error(ErrorCode::IdenticalEndmembers, "mineral and impurity signatures coincide");
  }
}

RepresentativePair refine_representatives(const PixelMatrix& soil_pixels, const std::vector<double>& ra,
                                          double ra_high, double ra_low) {
  if (static_cast<std::size_t>(soil_pixels.cols()) != ra.size()) {
    throw Error(ErrorCode::LengthMismatch, "relative availability and pixel counts differ");
  }
  if (!(ra_low < ra_high)) throw Error(ErrorCode::InvalidConfig, "ra_low must be below ra_high");
  RepresentativePair pair;
  pair.mineral = Spectrum::Zero(soil_pixels.rows());
  pair.impurity = Spectrum::Zero(soil_pixels.rows());
  for (std::size_t j = 0; j < ra.size(); ++j) {
    if (ra[j] > ra_high) {
      pair.mineral += soil_pixels.col(static_cast<Eigen::Index>(j));
      ++pair.mineral_count;
    } else if (ra[j] < ra_low) {
      pair.impurity += soil_pixels.col(static_cast<Eigen::Index>(j));
      ++pair.impurity_count;
    }
  }
  if (pair.mineral_count == 0 || pair.impurity_count == 0) {
    const std::string side = pair.mineral_count == 0 ? "high" : "low";
    throw Error(ErrorCode::EmptyBand, "no pixel on the " + side + " side (" + std::to_string(pair.mineral_count) +
                                          " above " + std::to_string(ra_high) + ", " +
                                          std::to_string(pair.impurity_count) + " below " + std::to_string(ra_low) +
                                          ")");
  }
  pair.mineral /= static_cast<double>(pair.mineral_count);
  pair.impurity /= static_cast<double>(pair.impurity_count);
  pair.source = Provenance::RaRefined;
  return pair;
}

AlphaEstimate solve_alpha(const SpectrumRef& s, const MixtureModel& model) {
  if (s.size() != model.mineral.size()) {
    throw Error(ErrorCode::LengthMismatch, "pixel and mixture model differ in band count");
  }
  const Spectrum axis = model.mineral - model.impurity;
  const double denom = axis.squaredNorm();
  if (denom == 0.0) throw Error(ErrorCode::IdenticalEndmembers, "mineral and impurity signatures coincide");
  AlphaEstimate est;
  est.alpha = std::clamp((s - model.impurity).dot(axis) / denom, 0.0, 1.0);
  est.residual = (est.alpha * model.mineral + (1.0 - est.alpha) * model.impurity - s).norm();
  return est;
}

AbundanceMap abundance_map(const PixelMatrix& soil_pixels, const std::vector<std::size_t>& indices,
                           std::size_t rows, std::size_t cols, const MixtureModel& model, int threads) {
  model.validate();
  if (static_cast<std::size_t>(soil_pixels.cols()) != indices.size()) {
    throw Error(ErrorCode::LengthMismatch, "pixel and index counts differ");
  }
  AbundanceMap map;
  map.rows = rows;
  map.cols = cols;
  map.alpha.assign(rows * cols, std::numeric_limits<double>::quiet_NaN());
  map.residual.assign(rows * cols, std::numeric_limits<double>::quiet_NaN());
  for (auto idx : indices) {
    if (idx >= rows * cols) throw Error(ErrorCode::RangeOutOfBounds, "pixel index outside the raster");
  }
  parallel_for(indices.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const AlphaEstimate est = solve_alpha(soil_pixels.col(static_cast<Eigen::Index>(j)), model);
      map.alpha[indices[j]] = est.alpha;
      map.residual[indices[j]] = est.residual;
    }
  });
  return map;
}

}  // namespace lithomap
