#pragma once

#include <cstddef>
#include <vector>

#include "lithomap/core.hpp"
#include "lithomap/subclass.hpp"

namespace lithomap {

struct FisherDirection {
  Spectrum w;  ///< unit norm, oriented so the mineral mean projects higher
  double mu_mineral_proj = 0.0;
  double mu_impurity_proj = 0.0;
  double fisher_ratio = 0.0;
};

/// (w . (mu_m - mu_i))^2 / (w' S_w w) with S_w the pooled within-class
/// scatter. Infinite when the classes have no spread along w but differ.
double fisher_ratio(const SpectrumRef& w, const PixelMatrix& mineral, const PixelMatrix& impurity);

/// Pooled within-class scatter of two pixel sets.
Eigen::MatrixXd within_class_scatter(const PixelMatrix& mineral, const PixelMatrix& impurity);

/// Two-class Fisher discriminant. The scatter is regularized by
/// ridge * trace(S_w) / bands on the diagonal before solving. Throws
/// SingularScatter if the system still cannot be solved.
FisherDirection fisher_direction(const PixelMatrix& mineral, const PixelMatrix& impurity, double ridge = 1e-6);

struct ProjectedPixel {
  double t = 0.0;
  double d_m = 0.0;
  double d_i = 0.0;
  double ra = 0.0;
};

/// d_i / (d_m + d_i).
double relative_availability(double d_m, double d_i);

/// Project every soil pixel and both representatives onto the direction
/// and score relative availability from the 1-D distances.
std::vector<ProjectedPixel> project_soil(const PixelMatrix& soil_pixels, const RepresentativePair& representatives,
                                         const FisherDirection& direction, int threads = 1);

struct ProjectedClassStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
};

struct SeparationReport {
  double mean_gap = 0.0;        ///< |mean t (mineral) - mean t (impurity)|
  double normalized_gap = 0.0;  ///< mean_gap / pooled standard deviation
  ProjectedClassStats mineral;
  ProjectedClassStats impurity;
};

SeparationReport separation_report(const std::vector<ProjectedPixel>& projections, const SubclassMap& map);

}  // namespace lithomap
