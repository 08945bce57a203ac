#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lithomap/core.hpp"
#include "lithomap/cube.hpp"

namespace lithomap {

struct KMeansResult {
  std::vector<int> assignments;  ///< cluster per pixel column
  PixelMatrix centroids;         ///< bands x k
  double wcss = 0.0;
  int iterations = 0;
};

/// Lloyd iterations from `restarts` seeded k-means++ initializations; the
/// lowest-WCSS run is returned. Stops when no centroid moves by more than
/// 1e-6 (max abs coordinate) or after 300 iterations.
KMeansResult kmeans(const PixelMatrix& pixels, int k, std::uint64_t seed, int restarts = 8, int threads = 1);

/// Lloyd iterations from explicit starting centroids.
KMeansResult kmeans_from(const PixelMatrix& pixels, PixelMatrix centroids, int threads = 1);

/// Sum of squared distances of each pixel to its assigned centroid.
double within_cluster_sum_of_squares(const PixelMatrix& pixels, const PixelMatrix& centroids,
                                     const std::vector<int>& assignments);

struct ElbowCurve {
  std::vector<int> k_values;
  std::vector<double> wcss;
  int chosen_k = 1;
  bool degenerate = false;
};

struct ElbowChoice {
  int k = 1;
  bool degenerate = false;  ///< constant curve, k forced to 1
};

/// Knee of a WCSS curve sampled at k = 1..n: the interior point farthest
/// from the chord joining the end points once both axes are min-max
/// scaled. Ties go to the smaller k. Needs at least 3 points.
ElbowChoice elbow_select(const std::vector<double>& wcss);

/// WCSS for k = 1..k_max. Besides the k-means++ restarts, each k also runs
/// from the best (k-1) centroids plus the farthest pixel, which keeps the
/// curve non-increasing.
ElbowCurve wcss_curve(const PixelMatrix& pixels, int k_max, std::uint64_t seed, int restarts = 8, int threads = 1);

struct VcaResult {
  PixelMatrix endmembers;             ///< bands x p, actual input pixels
  std::vector<Eigen::Index> indices;  ///< pixel column of each endmember
  double snr_db = 0.0;
  bool projective = false;  ///< low-SNR branch (p-1 subspace plus offset)
};

/// Vertex component analysis. Throws RankDeficient when the affine
/// dimension of the pixel cloud is below p - 1.
VcaResult vca(const PixelMatrix& pixels, int p, std::uint64_t seed);

/// Affine dimension of a pixel cloud (rank of the centered data).
int affine_dimension(const PixelMatrix& pixels);

inline constexpr int kUnassigned = -1;
inline constexpr int kInvalidPixel = -2;

/// Per-candidate affinity of one pixel: reciprocal distances normalized to
/// sum to one. A zero distance puts all weight on the first such candidate.
/// Inputs are expected to be L2-normalized already.
Spectrum similarity_row(const SpectrumRef& pixel, const PixelMatrix& candidates);

struct ClassMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> labels;  ///< class id, kUnassigned or kInvalidPixel
  std::vector<std::string> class_names;
  std::vector<SpectralSignature> class_means;  ///< over assigned pixels only
  std::vector<std::size_t> class_counts;

  int class_count() const { return static_cast<int>(class_names.size()); }
  std::size_t unassigned_count() const;
};

/// Assign each valid pixel to the candidate whose affinity strictly exceeds
/// `threshold`; pixels and candidates are L2-normalized first. Candidates
/// are bands x n over the cube's usable bands.
ClassMap similarity_assign(const HyperspectralCube& cube, const PixelMatrix& candidates, double threshold = 0.5,
                           int threads = 1);

struct ClassPixels {
  PixelMatrix pixels;                ///< bands x n, usable bands only
  std::vector<std::size_t> indices;  ///< row-major pixel index of each column
};

/// Extract one class in row-major order. Throws EmptyClass.
ClassPixels isolate_class(const HyperspectralCube& cube, const ClassMap& map, int class_id);

/// Reorder candidate columns by ascending mean value (dark to bright),
/// giving stable class ids for a scene regardless of extraction order.
void sort_candidates_by_brightness(VcaResult& result);

}  // namespace lithomap
