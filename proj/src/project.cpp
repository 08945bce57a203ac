#include "lithomap/project.hpp"

#include <cmath>
#include <limits>

#include "lithomap/error.hpp"

namespace lithomap {

Eigen::MatrixXd within_class_scatter(const PixelMatrix& mineral, const PixelMatrix& impurity) {
  const PixelMatrix cm = mineral.colwise() - Spectrum(mineral.rowwise().mean());
  const PixelMatrix ci = impurity.colwise() - Spectrum(impurity.rowwise().mean());
  return cm * cm.transpose() + ci * ci.transpose();
}

double fisher_ratio(const SpectrumRef& w, const PixelMatrix& mineral, const PixelMatrix& impurity) {
  if (mineral.cols() == 0 || impurity.cols() == 0) {
    throw Error(ErrorCode::EmptySubclass, "Fisher ratio needs two non-empty classes");
  }
  const Spectrum delta = mineral.rowwise().mean() - impurity.rowwise().mean();
  const double between = std::pow(w.dot(delta), 2);
  // projected within-class scatter without forming S_w
  const Eigen::RowVectorXd pm = w.transpose() * mineral;
  const Eigen::RowVectorXd pi = w.transpose() * impurity;
  const double within = (pm.array() - pm.mean()).square().sum() + (pi.array() - pi.mean()).square().sum();
  if (within > 0.0) return between / within;
  return between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

FisherDirection fisher_direction(const PixelMatrix& mineral, const PixelMatrix& impurity, double ridge) {
  if (mineral.cols() < 2 || impurity.cols() < 2) {
    throw Error(ErrorCode::EmptySubclass, "Fisher direction needs at least 2 pixels per class (got " +
                                              std::to_string(mineral.cols()) + " mineral, " +
                                              std::to_string(impurity.cols()) + " impurity)");
  }
  if (mineral.rows() != impurity.rows()) throw Error(ErrorCode::LengthMismatch, "classes differ in band count");
  const Eigen::Index bands = mineral.rows();
  const Spectrum delta = mineral.rowwise().mean() - impurity.rowwise().mean();
  Eigen::MatrixXd scatter = within_class_scatter(mineral, impurity);
  const double shift = ridge * scatter.trace() / static_cast<double>(bands);
  scatter.diagonal().array() += shift;

  Spectrum w;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(scatter);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && shift > 0.0) {
    w = ldlt.solve(delta);
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(scatter);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::SingularScatter, "within-class scatter is singular after regularization");
    }
    w = lu.solve(delta);
  }
  const double norm = w.norm();
  if (!std::isfinite(norm) || !(norm > 0.0)) {
    throw Error(ErrorCode::SingularScatter, "discriminant direction is degenerate");
  }
  w /= norm;
  if (w.dot(delta) < 0.0) w = -w;

  FisherDirection out;
  out.w = w;
  out.mu_mineral_proj = w.dot(mineral.rowwise().mean());
  out.mu_impurity_proj = w.dot(impurity.rowwise().mean());
  out.fisher_ratio = fisher_ratio(w, mineral, impurity);
  return out;
}

double relative_availability(double d_m, double d_i) { return d_i / (d_m + d_i); }

std::vector<ProjectedPixel> project_soil(const PixelMatrix& soil_pixels, const RepresentativePair& representatives,
                                         const FisherDirection& direction, int threads) {
  if (soil_pixels.rows() != direction.w.size() || representatives.mineral.size() != direction.w.size() ||
      representatives.impurity.size() != direction.w.size()) {
    throw Error(ErrorCode::GridMismatch, "projection inputs differ in band count");
  }
  const double tm = direction.w.dot(representatives.mineral);
  const double ti = direction.w.dot(representatives.impurity);
  if (tm == ti) {
    throw Error(ErrorCode::DegenerateRepresentatives, "representatives project onto the same point");
  }
  std::vector<ProjectedPixel> out(static_cast<std::size_t>(soil_pixels.cols()));
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      ProjectedPixel& p = out[j];
      p.t = direction.w.dot(soil_pixels.col(static_cast<Eigen::Index>(j)));
      p.d_m = std::abs(p.t - tm);
      p.d_i = std::abs(p.t - ti);
      p.ra = relative_availability(p.d_m, p.d_i);
    }
  });
  return out;
}

SeparationReport separation_report(const std::vector<ProjectedPixel>& projections, const SubclassMap& map) {
  if (projections.size() != map.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "projections and subclass map differ in size");
  }
  auto stats = [&](Subclass which) {
    ProjectedClassStats s;
    double sum = 0.0;
    for (std::size_t j = 0; j < projections.size(); ++j) {
      if (map.labels[j] != which) continue;
      sum += projections[j].t;
      ++s.count;
    }
    if (s.count == 0) {
      throw Error(ErrorCode::EmptySubclass, which == Subclass::Mineral ? "mineral subclass is empty"
                                                                       : "impurity subclass is empty");
    }
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (std::size_t j = 0; j < projections.size(); ++j) {
      if (map.labels[j] == which) ss += std::pow(projections[j].t - s.mean, 2);
    }
    s.variance = ss / static_cast<double>(s.count);
    return s;
  };
  SeparationReport r;
  r.mineral = stats(Subclass::Mineral);
  r.impurity = stats(Subclass::Impurity);
  r.mean_gap = std::abs(r.mineral.mean - r.impurity.mean);
  const double pooled =
      (r.mineral.variance * static_cast<double>(r.mineral.count) +
       r.impurity.variance * static_cast<double>(r.impurity.count)) /
      static_cast<double>(r.mineral.count + r.impurity.count);
  r.normalized_gap = pooled > 0.0 ? r.mean_gap / std::sqrt(pooled)
                                  : (r.mean_gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return r;
}

}  // namespace lithomap
