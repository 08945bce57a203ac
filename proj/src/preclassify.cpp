#include "lithomap/preclassify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lithomap/error.hpp"
#include "lithomap/random.hpp"

namespace lithomap {
namespace {

constexpr int kMaxIterations = 300;
constexpr double kShiftTolerance = 1e-6;

// Nearest centroid per pixel (ties to the lower index) and its squared distance.
void assign(const PixelMatrix& pixels, const PixelMatrix& centroids, std::vector<int>& labels,
            std::vector<double>& dist2, int threads) {
  const auto n = static_cast<std::size_t>(pixels.cols());
  labels.resize(n);
  dist2.resize(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto col = pixels.col(static_cast<Eigen::Index>(j));
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
        const double d = (col - centroids.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      labels[j] = best;
      dist2[j] = best_d;
    }
  });
}

PixelMatrix kmeanspp_init(const PixelMatrix& pixels, int k, Rng& rng) {
  const auto n = static_cast<std::size_t>(pixels.cols());
  PixelMatrix centroids(pixels.rows(), k);
  centroids.col(0) = pixels.col(static_cast<Eigen::Index>(rng.index(n)));
  std::vector<double> d2(n);
  for (std::size_t j = 0; j < n; ++j) {
    d2[j] = (pixels.col(static_cast<Eigen::Index>(j)) - centroids.col(0)).squaredNorm();
  }
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      pick = n - 1;
      for (std::size_t j = 0; j < n; ++j) {
        running += d2[j];
        if (running > target && d2[j] > 0.0) {
          pick = j;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    centroids.col(c) = pixels.col(static_cast<Eigen::Index>(pick));
    for (std::size_t j = 0; j < n; ++j) {
      d2[j] = std::min(d2[j], (pixels.col(static_cast<Eigen::Index>(j)) - centroids.col(c)).squaredNorm());
    }
  }
  return centroids;
}

std::size_t farthest_pixel(const std::vector<double>& dist2) {
  return static_cast<std::size_t>(std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
}

}  // namespace

double within_cluster_sum_of_squares(const PixelMatrix& pixels, const PixelMatrix& centroids,
                                     const std::vector<int>& assignments) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < pixels.cols(); ++j) {
    total += (pixels.col(j) - centroids.col(assignments[static_cast<std::size_t>(j)])).squaredNorm();
  }
  return total;
}

KMeansResult kmeans_from(const PixelMatrix& pixels, PixelMatrix centroids, int threads) {
  const int k = static_cast<int>(centroids.cols());
  KMeansResult result;
  std::vector<double> dist2;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    assign(pixels, centroids, result.assignments, dist2, threads);
    result.iterations = iter + 1;

    // fixed pixel order per cluster keeps the update independent of threads
    PixelMatrix sums = PixelMatrix::Zero(pixels.rows(), k);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index j = 0; j < pixels.cols(); ++j) {
      const int c = result.assignments[static_cast<std::size_t>(j)];
      sums.col(c) += pixels.col(j);
      ++counts[static_cast<std::size_t>(c)];
    }
    PixelMatrix updated = centroids;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        updated.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // empty cluster: restart it on the worst-served pixel
        const std::size_t far = farthest_pixel(dist2);
        updated.col(c) = pixels.col(static_cast<Eigen::Index>(far));
        dist2[far] = 0.0;
      }
    }
    const double shift = (updated - centroids).cwiseAbs().maxCoeff();
    centroids = std::move(updated);
    if (shift < kShiftTolerance) break;
  }
  assign(pixels, centroids, result.assignments, dist2, threads);
  result.wcss = 0.0;
  for (double d : dist2) result.wcss += d;
  result.centroids = std::move(centroids);
  return result;
}

KMeansResult kmeans(const PixelMatrix& pixels, int k, std::uint64_t seed, int restarts, int threads) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
  if (pixels.cols() < k) {
    throw Error(ErrorCode::TooFewPixels,
                std::to_string(pixels.cols()) + " pixels cannot form " + std::to_string(k) + " clusters");
  }
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(r)));
    KMeansResult run = kmeans_from(pixels, kmeanspp_init(pixels, k, rng), threads);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  return best;
}

ElbowChoice elbow_select(const std::vector<double>& wcss) {
  if (wcss.size() < 3) throw Error(ErrorCode::InvalidConfig, "elbow selection needs k_max >= 3");
  const auto [lo_it, hi_it] = std::minmax_element(wcss.begin(), wcss.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return {1, true};
  const double n = static_cast<double>(wcss.size() - 1);
  // chord from (0, y0) to (1, y1) in scaled coordinates
  const double y0 = (wcss.front() - lo) / (hi - lo);
  const double y1 = (wcss.back() - lo) / (hi - lo);
  const double dy = y1 - y0;
  const double norm = std::sqrt(1.0 + dy * dy);
  int best_k = 2;
  double best = -1.0;
  for (std::size_t i = 1; i + 1 < wcss.size(); ++i) {
    const double x = static_cast<double>(i) / n;
    const double y = (wcss[i] - lo) / (hi - lo);
    const double dist = std::abs(dy * x - y + y0) / norm;
    if (dist > best) {
      best = dist;
      best_k = static_cast<int>(i) + 1;
    }
  }
  return {best_k, false};
}

ElbowCurve wcss_curve(const PixelMatrix& pixels, int k_max, std::uint64_t seed, int restarts, int threads) {
  if (k_max < 1) throw Error(ErrorCode::InvalidConfig, "k_max must be at least 1");
  const int top = static_cast<int>(std::min<Eigen::Index>(k_max, pixels.cols()));
  if (top < 1) throw Error(ErrorCode::TooFewPixels, "no pixels to cluster");
  ElbowCurve curve;
  KMeansResult previous;
  for (int k = 1; k <= top; ++k) {
    KMeansResult best = kmeans(pixels, k, Rng::mix(seed, 1000 + static_cast<std::uint64_t>(k)), restarts, threads);
    if (k > 1) {
      std::vector<int> labels;
      std::vector<double> dist2;
      assign(pixels, previous.centroids, labels, dist2, threads);
      PixelMatrix init(pixels.rows(), k);
      init.leftCols(k - 1) = previous.centroids;
      init.col(k - 1) = pixels.col(static_cast<Eigen::Index>(farthest_pixel(dist2)));
      KMeansResult warm = kmeans_from(pixels, std::move(init), threads);
      if (warm.wcss < best.wcss) best = std::move(warm);
    }
    curve.k_values.push_back(k);
    curve.wcss.push_back(best.wcss);
    previous = std::move(best);
  }
  if (curve.wcss.size() >= 3) {
    const ElbowChoice choice = elbow_select(curve.wcss);
    curve.chosen_k = choice.k;
    curve.degenerate = choice.degenerate;
  } else {
    curve.chosen_k = top;
  }
  return curve;
}

int affine_dimension(const PixelMatrix& pixels) {
  if (pixels.cols() < 2) return 0;
  const Spectrum mean = pixels.rowwise().mean();
  const PixelMatrix centered = pixels.colwise() - mean;
  const Eigen::MatrixXd cov = centered * centered.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > 1e-10 * top) ++rank;
  }
  return rank;
}

namespace {

// Leading `p` eigenvectors (descending eigenvalue) of a symmetric matrix.
Eigen::MatrixXd leading_eigenvectors(const Eigen::MatrixXd& sym, int p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  Eigen::MatrixXd out(sym.rows(), p);
  for (int i = 0; i < p; ++i) out.col(i) = vecs.col(vecs.cols() - 1 - i);
  return out;
}

}  // namespace

VcaResult vca(const PixelMatrix& pixels, int p, std::uint64_t seed) {
  if (p < 1) throw Error(ErrorCode::InvalidConfig, "endmember count must be at least 1");
  const Eigen::Index bands = pixels.rows();
  const Eigen::Index n = pixels.cols();
  if (n < p) {
    throw Error(ErrorCode::TooFewPixels, std::to_string(n) + " pixels for " + std::to_string(p) + " endmembers");
  }
  if (p > bands) throw Error(ErrorCode::RankDeficient, "more endmembers than bands");
  const int dim = affine_dimension(pixels);
  if (dim < p - 1) {
    throw Error(ErrorCode::RankDeficient, "pixel cloud has affine dimension " + std::to_string(dim) + ", need " +
                                              std::to_string(p - 1) + " for " + std::to_string(p) + " endmembers");
  }

  VcaResult result;
  if (p == 1) {
    Eigen::Index best = 0;
    pixels.colwise().squaredNorm().maxCoeff(&best);
    result.indices = {best};
    result.endmembers = pixels.col(best);
    result.snr_db = std::numeric_limits<double>::infinity();
    return result;
  }

  const Spectrum mean = pixels.rowwise().mean();
  const PixelMatrix centered = pixels.colwise() - mean;
  const double count = static_cast<double>(n);
  const Eigen::MatrixXd subspace = leading_eigenvectors(centered * centered.transpose() / count, p);
  const Eigen::MatrixXd projected = subspace.transpose() * centered;

  const double power_total = pixels.squaredNorm() / count;
  const double power_signal = projected.squaredNorm() / count + mean.squaredNorm();
  const double noise = power_total - power_signal;
  const double signal = power_signal - static_cast<double>(p) / static_cast<double>(bands) * power_total;
  if (noise <= 1e-12 * power_total) {
    result.snr_db = std::numeric_limits<double>::infinity();
  } else if (signal <= 0.0) {
    result.snr_db = -std::numeric_limits<double>::infinity();
  } else {
    result.snr_db = 10.0 * std::log10(signal / noise);
  }
  const double snr_threshold = 15.0 + 10.0 * std::log10(static_cast<double>(p));

  Eigen::MatrixXd y(p, n);
  if (result.snr_db < snr_threshold) {
    // projective projection onto the p-1 leading directions plus a constant
    result.projective = true;
    const Eigen::MatrixXd x = projected.topRows(p - 1);
    const double c = x.colwise().norm().maxCoeff();
    y.topRows(p - 1) = x;
    y.row(p - 1).setConstant(c > 0.0 ? c : 1.0);
  } else {
    const Eigen::MatrixXd basis = leading_eigenvectors(pixels * pixels.transpose() / count, p);
    const Eigen::MatrixXd x = basis.transpose() * pixels;
    const Spectrum u = x.rowwise().mean();
    const Eigen::RowVectorXd scale = u.transpose() * x;
    for (Eigen::Index j = 0; j < n; ++j) y.col(j) = x.col(j) / scale[j];
  }

  Rng rng(seed);
  Eigen::MatrixXd basis_a = Eigen::MatrixXd::Zero(p, p);
  basis_a(p - 1, 0) = 1.0;
  for (int i = 0; i < p; ++i) {
    Spectrum f;
    for (int attempt = 0; attempt < 64; ++attempt) {
      Spectrum w(p);
      for (int d = 0; d < p; ++d) w[d] = rng.uniform();
      const Eigen::MatrixXd pinv = basis_a.completeOrthogonalDecomposition().pseudoInverse();
      f = w - basis_a * (pinv * w);
      if (f.norm() > 1e-12) break;
    }
    if (!(f.norm() > 1e-12)) throw Error(ErrorCode::RankDeficient, "no direction orthogonal to extracted endmembers");
    f.normalize();
    const Eigen::RowVectorXd v = f.transpose() * y;
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    result.indices.push_back(idx);
    basis_a.col(i) = y.col(idx);
  }
  result.endmembers.resize(bands, p);
  for (int i = 0; i < p; ++i) result.endmembers.col(i) = pixels.col(result.indices[static_cast<std::size_t>(i)]);
  return result;
}

void sort_candidates_by_brightness(VcaResult& result) {
  const auto p = static_cast<std::size_t>(result.endmembers.cols());
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.endmembers.col(static_cast<Eigen::Index>(a)).mean() <
           result.endmembers.col(static_cast<Eigen::Index>(b)).mean();
  });
  PixelMatrix sorted(result.endmembers.rows(), result.endmembers.cols());
  std::vector<Eigen::Index> indices(p);
  for (std::size_t i = 0; i < p; ++i) {
    sorted.col(static_cast<Eigen::Index>(i)) = result.endmembers.col(static_cast<Eigen::Index>(order[i]));
    indices[i] = result.indices[order[i]];
  }
  result.endmembers = std::move(sorted);
  result.indices = std::move(indices);
}

Spectrum similarity_row(const SpectrumRef& pixel, const PixelMatrix& candidates) {
  const Eigen::Index n = candidates.cols();
  Spectrum dist(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist[i] = euclidean_distance(pixel, candidates.col(i));
    if (dist[i] == 0.0) {
      Spectrum gamma = Spectrum::Zero(n);
      gamma[i] = 1.0;
      return gamma;
    }
  }
  const double total = dist.cwiseInverse().sum();
  Spectrum gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) gamma[i] = 1.0 / (dist[i] * total);
  return gamma;
}

std::size_t ClassMap::unassigned_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kUnassigned));
}

ClassMap similarity_assign(const HyperspectralCube& cube, const PixelMatrix& candidates, double threshold,
                           int threads) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "similarity threshold must lie in (0, 1)");
  }
  const auto usable = cube.usable_bands();
  if (static_cast<std::size_t>(candidates.rows()) != usable.size()) {
    throw Error(ErrorCode::LengthMismatch, "candidates have " + std::to_string(candidates.rows()) +
                                               " bands, cube has " + std::to_string(usable.size()) + " usable");
  }
  PixelMatrix normalized(candidates.rows(), candidates.cols());
  for (Eigen::Index i = 0; i < candidates.cols(); ++i) normalized.col(i) = l2_normalize(candidates.col(i));

  ClassMap map;
  map.rows = cube.rows;
  map.cols = cube.cols;
  map.labels.assign(cube.pixel_count(), kInvalidPixel);
  parallel_for(cube.pixel_count(), threads, [&](std::size_t begin, std::size_t end) {
    Spectrum px(static_cast<Eigen::Index>(usable.size()));
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (!cube.valid_mask[idx]) continue;
      const auto raw = cube.pixel(idx);
      for (std::size_t b = 0; b < usable.size(); ++b) px[static_cast<Eigen::Index>(b)] = raw[usable[b]];
      const double norm = px.norm();
      if (!(norm > 0.0)) continue;
      const Spectrum gamma = similarity_row(px / norm, normalized);
      Eigen::Index best = 0;
      const double top = gamma.maxCoeff(&best);
      map.labels[idx] = top > threshold ? static_cast<int>(best) : kUnassigned;
    }
  });

  const auto k = static_cast<std::size_t>(candidates.cols());
  const Spectrum wavelengths = cube.usable_wavelengths();
  std::vector<Spectrum> sums(k, Spectrum::Zero(static_cast<Eigen::Index>(usable.size())));
  map.class_counts.assign(k, 0);
  for (std::size_t idx = 0; idx < cube.pixel_count(); ++idx) {
    const int label = map.labels[idx];
    if (label < 0) continue;
    const auto raw = cube.pixel(idx);
    for (std::size_t b = 0; b < usable.size(); ++b) sums[label][static_cast<Eigen::Index>(b)] += raw[usable[b]];
    ++map.class_counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < k; ++c) {
    map.class_names.push_back("class_" + std::to_string(c));
    SpectralSignature mean;
    mean.wavelengths = wavelengths;
    mean.values = map.class_counts[c] > 0 ? Spectrum(sums[c] / static_cast<double>(map.class_counts[c]))
                                          : Spectrum(candidates.col(static_cast<Eigen::Index>(c)));
    mean.label = map.class_names.back();
    mean.provenance = map.class_counts[c] > 0 ? Provenance::ClassMean : Provenance::Extracted;
    map.class_means.push_back(std::move(mean));
  }
  return map;
}

ClassPixels isolate_class(const HyperspectralCube& cube, const ClassMap& map, int class_id) {
  if (class_id < 0 || class_id >= map.class_count()) {
    throw Error(ErrorCode::InvalidConfig, "class id " + std::to_string(class_id) + " does not exist");
  }
  ClassPixels out;
  for (std::size_t idx = 0; idx < map.labels.size(); ++idx) {
    if (map.labels[idx] == class_id) out.indices.push_back(idx);
  }
  if (out.indices.empty()) {
    throw Error(ErrorCode::EmptyClass, "class '" + map.class_names[static_cast<std::size_t>(class_id)] +
                                           "' has no pixels");
  }
  out.pixels = cube.masked_pixels(out.indices);
  return out;
}

}  // namespace lithomap
