#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "lithomap/core.hpp"
#include "lithomap/cube.hpp"
#include "lithomap/keyvalue.hpp"
#include "lithomap/preclassify.hpp"

namespace lithomap {

/// Layout of a synthetic scene: a water strip and a vegetation strip on top,
/// soil below. Soil columns run from pure impurity (left) through a linear
/// alpha ramp to pure mineral (right). Soil pixels also carry a paired
/// texture term orthogonal to (mineral - impurity): adjacent columns get
/// +e and -e, so the term cancels in any pure-region mean and never moves
/// the least-squares alpha.
struct SceneSpec {
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t bands = 100;
  double wavelength_min = 0.4;
  double wavelength_max = 2.5;
  std::size_t water_rows = 8;
  std::size_t vegetation_rows = 8;
  double impurity_fraction = 0.25;  ///< share of soil columns with alpha = 0
  double mineral_fraction = 0.25;   ///< share of soil columns with alpha = 1
  double ramp_low = 0.25;           ///< alpha at the first ramp column
  double ramp_high = 0.75;          ///< alpha at the last ramp column
  double texture = 0.08;            ///< |e| relative to ||mineral - impurity||
  double lab_offset = 0.3;          ///< lab departure from the mineral shape
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;

  void validate() const;
  static SceneSpec from_config(const KeyValueFile& kv);
};

struct SceneGenerators {
  Spectrum wavelengths;
  Spectrum water;
  Spectrum vegetation;
  Spectrum mineral;
  Spectrum impurity;
  Spectrum lab;  ///< laboratory-style reference for the mineral
};

SceneGenerators scene_generators(const SceneSpec& spec);

inline constexpr int kTruthWater = 0;
inline constexpr int kTruthVegetation = 1;
inline constexpr int kTruthSoil = 2;

struct Scene {
  HyperspectralCube cube;  ///< reflectance, float32
  ClassMap truth;          ///< water / vegetation / soil
  std::vector<double> alpha;  ///< NaN off soil
  SceneGenerators generators;

  std::vector<std::size_t> soil_indices() const;
};

/// Deterministic for a given spec (MT19937-64 streams, fixed fill order).
Scene generate_scene(const SceneSpec& spec);

/// Exhaustive minimizer of 1/2 ||a m + (1 - a) r - s||^2 over a = 0, step,
/// 2 step, ..., 1 (1 is always included).
double grid_search_alpha(const SpectrumRef& s, const SpectrumRef& m, const SpectrumRef& r, double step);

/// Largest Fisher ratio over the given unit directions (columns).
double max_fisher_ratio(const PixelMatrix& mineral, const PixelMatrix& impurity, const PixelMatrix& directions);

/// Largest Fisher ratio over `n_draws` seeded random unit directions.
double random_direction_fisher(const PixelMatrix& mineral, const PixelMatrix& impurity, int n_draws,
                               std::uint64_t seed);

/// Two Gaussian classes sharing an anisotropic covariance.
struct TwoClassSample {
  PixelMatrix a;
  PixelMatrix b;
  Eigen::MatrixXd mixing;  ///< x = mean + mixing * z, z standard normal
};

TwoClassSample two_gaussian_classes(std::size_t n_a, std::size_t n_b, std::size_t dims, std::uint64_t seed);

/// Noiseless simplex: random positive endmembers, Dirichlet-like
/// abundances, with one pure pixel per endmember at a seeded position.
struct SimplexSample {
  PixelMatrix endmembers;  ///< bands x p
  PixelMatrix pixels;      ///< bands x n
};

SimplexSample simplex_mixture(int p, std::size_t bands, std::size_t n, std::uint64_t seed);

}  // namespace lithomap
