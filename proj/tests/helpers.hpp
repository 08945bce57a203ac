#pragma once

#include <doctest.h>

#include <filesystem>
#include <string>

#include "lithomap/core.hpp"
#include "lithomap/cube.hpp"
#include "lithomap/error.hpp"
#include "lithomap/random.hpp"

namespace testing {

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lithomap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline lithomap::Spectrum random_vector(lithomap::Rng& rng, Eigen::Index n, double scale = 1.0) {
  lithomap::Spectrum v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

inline lithomap::Spectrum random_positive(lithomap::Rng& rng, Eigen::Index n) {
  lithomap::Spectrum v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 0.05 + rng.uniform();
  return v;
}

/// Reflectance cube with evenly spaced wavelengths and the given pixel
/// columns (bands x rows*cols) in row-major order.
inline lithomap::HyperspectralCube cube_from(const lithomap::PixelMatrix& pixels, std::size_t rows,
                                             std::size_t cols) {
  lithomap::HyperspectralCube cube(rows, cols, static_cast<std::size_t>(pixels.rows()));
  for (std::size_t b = 0; b < cube.bands; ++b) cube.wavelengths[b] = 0.4 + 0.01 * static_cast<double>(b);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    auto px = cube.pixel(i);
    for (std::size_t b = 0; b < cube.bands; ++b) {
      px[b] = static_cast<float>(pixels(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)));
    }
  }
  cube.refresh_validity();
  return cube;
}

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected)                         \
  do {                                                           \
    bool thrown_ = false;                                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const lithomap::Error& e) {                         \
      thrown_ = true;                                            \
      CHECK_MESSAGE(e.code() == (expected), e.what());           \
    }                                                            \
    CHECK_MESSAGE(thrown_, "expected " #expected " from " #expr); \
  } while (0)
