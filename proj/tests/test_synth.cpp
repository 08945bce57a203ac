#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "lithomap/synth.hpp"

using namespace lithomap;

TEST_SUITE("synth") {
  TEST_CASE("spec validation and config") {
    SceneSpec s;
    CHECK_NOTHROW(s.validate());
    s.water_rows = 60;
    CHECK_ERROR_CODE(s.validate(), ErrorCode::InvalidSpec);
    s = SceneSpec{};
    s.impurity_fraction = 0.7;
    s.mineral_fraction = 0.4;
    CHECK_ERROR_CODE(generate_scene(s), ErrorCode::InvalidSpec);
    const auto kv = KeyValueFile::parse("rows = 20\ncols = 16\nsnr_db = 25\nseed = 9\n");
    const auto c = SceneSpec::from_config(kv);
    CHECK(c.rows == 20);
    CHECK(c.cols == 16);
    CHECK(c.snr_db == 25.0);
    CHECK(c.seed == 9);
  }

  TEST_CASE("noiseless scene without texture is an exact mixture") {
    SceneSpec s;
    s.texture = 0.0;
    const Scene scene = generate_scene(s);
    const auto& g = scene.generators;
    for (std::size_t r = 0; r < s.rows; ++r) {
      for (std::size_t c = 0; c < s.cols; ++c) {
        const std::size_t idx = r * s.cols + c;
        Spectrum expect;
        if (scene.truth.labels[idx] == kTruthWater) {
          expect = g.water;
          CHECK(std::isnan(scene.alpha[idx]));
        } else if (scene.truth.labels[idx] == kTruthVegetation) {
          expect = g.vegetation;
        } else {
          const double a = scene.alpha[idx];
          CHECK(a >= 0.0);
          CHECK(a <= 1.0);
          expect = a * g.mineral + (1 - a) * g.impurity;
        }
        const auto px = scene.cube.pixel(idx);
        for (std::size_t b = 0; b < s.bands; ++b) {
          CHECK(px[b] == static_cast<float>(expect[static_cast<Eigen::Index>(b)]));
        }
      }
    }
    CHECK(scene.alpha[16 * s.cols + 0] == 0.0);
    CHECK(scene.alpha[16 * s.cols + 63] == 1.0);
    CHECK(scene.alpha[16 * s.cols + 16] == doctest::Approx(0.25));
    CHECK(scene.alpha[16 * s.cols + 47] == doctest::Approx(0.75));
    CHECK(scene.soil_indices().size() == 48 * 64);
  }

  TEST_CASE("texture cancels in column pairs and stays off the mixing axis") {
    const Scene scene = generate_scene(SceneSpec{});
    const auto& g = scene.generators;
    const Spectrum axis = g.mineral - g.impurity;
    const std::size_t cols = 64;
    for (std::size_t c = 0; c < cols; c += 2) {
      const std::size_t i = 20 * cols + c;
      Spectrum p0(100), p1(100);
      for (Eigen::Index b = 0; b < 100; ++b) {
        p0[b] = scene.cube.pixel(i)[static_cast<std::size_t>(b)];
        p1[b] = scene.cube.pixel(i + 1)[static_cast<std::size_t>(b)];
      }
      const double a0 = scene.alpha[i], a1 = scene.alpha[i + 1];
      const Spectrum e = p0 - (a0 * g.mineral + (1 - a0) * g.impurity);
      const Spectrum e1 = p1 - (a1 * g.mineral + (1 - a1) * g.impurity);
      CHECK((e + e1).norm() < 1e-5);
      CHECK(std::abs(e.dot(axis)) / (e.norm() * axis.norm()) < 1e-5);
      CHECK(e.norm() == doctest::Approx(0.08 * axis.norm()).epsilon(1e-4));
    }
  }

  TEST_CASE("lab reference peaks at the pure mineral") {
    const auto g = scene_generators(SceneSpec{});
    double prev = -2.0;
    for (int k = 0; k <= 20; ++k) {
      const double a = k / 20.0;
      const double r = pearson_correlation(a * g.mineral + (1 - a) * g.impurity, g.lab);
      CHECK(r > prev);
      prev = r;
    }
    CHECK(prev < 0.999);  // the reference is not a scene pixel
  }

  TEST_CASE("scenes are deterministic per seed") {
    SceneSpec s;
    s.snr_db = 30.0;
    const Scene a = generate_scene(s);
    const Scene b = generate_scene(s);
    CHECK(std::memcmp(a.cube.data.data(), b.cube.data.data(), a.cube.data.size() * sizeof(float)) == 0);
    s.seed = 2;
    const Scene c = generate_scene(s);
    CHECK(a.cube.data != c.cube.data);
    SceneSpec inf;
    inf.snr_db = std::numeric_limits<double>::infinity();
    SceneSpec noiseless;
    CHECK(generate_scene(inf).cube.data == generate_scene(noiseless).cube.data);
  }

  TEST_CASE("noise matches the requested SNR") {
    SceneSpec clean;
    SceneSpec noisy;
    noisy.snr_db = 20.0;
    const auto a = generate_scene(clean).cube.data;
    const auto b = generate_scene(noisy).cube.data;
    double signal = 0.0, noise = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      signal += double(a[i]) * a[i];
      noise += (double(b[i]) - a[i]) * (double(b[i]) - a[i]);
    }
    CHECK(10.0 * std::log10(signal / noise) == doctest::Approx(20.0).epsilon(0.01));
  }

  TEST_CASE("grid search oracle") {
    Rng rng(2);
    const Spectrum m = testing::random_positive(rng, 10), r = testing::random_positive(rng, 10);
    CHECK(grid_search_alpha(m, m, r, 1e-3) == 1.0);
    CHECK(grid_search_alpha(0.5 * (m + r), m, r, 1e-3) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(grid_search_alpha(r, m, r, 0.3) == 0.0);
    CHECK(grid_search_alpha(m, m, r, 0.3) == 1.0);  // 1 is on the grid even when step does not divide it
    CHECK_ERROR_CODE(grid_search_alpha(m, m, r, 0.0), ErrorCode::InvalidConfig);
  }

  TEST_CASE("simplex and Gaussian fixtures") {
    const auto s = simplex_mixture(4, 30, 100, 3);
    CHECK(s.endmembers.cols() == 4);
    CHECK(s.pixels.cols() == 100);
    int pure = 0;
    for (Eigen::Index j = 0; j < 100; ++j) {
      for (Eigen::Index k = 0; k < 4; ++k) pure += (s.pixels.col(j) - s.endmembers.col(k)).norm() == 0.0;
    }
    CHECK(pure == 4);
    const auto g = two_gaussian_classes(10, 12, 5, 1);
    CHECK(g.a.cols() == 10);
    CHECK(g.b.cols() == 12);
    CHECK(g.a.rows() == 5);
  }
}
