#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "lithomap/preclassify.hpp"
#include "lithomap/synth.hpp"

using namespace lithomap;

namespace {

PixelMatrix two_blobs(std::size_t per_blob, std::uint64_t seed) {
  Rng rng(seed);
  PixelMatrix x(2, static_cast<Eigen::Index>(2 * per_blob));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double cx = j < static_cast<Eigen::Index>(per_blob) ? 0.0 : 50.0;
    x(0, j) = cx + 0.5 * rng.normal();
    x(1, j) = cx + 0.5 * rng.normal();
  }
  return x;
}

// Within-blob scatter computed directly from the known split.
double blob_scatter(const PixelMatrix& x, std::size_t per_blob) {
  double total = 0.0;
  for (int blob = 0; blob < 2; ++blob) {
    const auto block = x.middleCols(blob * static_cast<Eigen::Index>(per_blob), static_cast<Eigen::Index>(per_blob));
    const Spectrum mean = block.rowwise().mean();
    total += (block.colwise() - mean).squaredNorm();
  }
  return total;
}

}  // namespace

TEST_SUITE("preclassify") {
  TEST_CASE("kmeans trivial cases") {
    Rng rng(2);
    PixelMatrix x(3, 40);
    for (Eigen::Index j = 0; j < 40; ++j) x.col(j) = testing::random_vector(rng, 3);
    const auto one = kmeans(x, 1, 7);
    const Spectrum mean = x.rowwise().mean();
    CHECK((one.centroids.col(0) - mean).norm() < 1e-12);
    CHECK(one.wcss == doctest::Approx((x.colwise() - mean).squaredNorm()).epsilon(1e-12));

    const auto all = kmeans(x.leftCols(6), 6, 7);
    CHECK(all.wcss == doctest::Approx(0.0));
    CHECK_ERROR_CODE(kmeans(x.leftCols(2), 3, 7), ErrorCode::TooFewPixels);
  }

  TEST_CASE("kmeans on two separated blobs") {
    const PixelMatrix x = two_blobs(60, 3);
    const auto r = kmeans(x, 2, 1);
    CHECK(r.wcss == doctest::Approx(blob_scatter(x, 60)).epsilon(1e-10));
    for (Eigen::Index j = 1; j < 60; ++j) CHECK(r.assignments[static_cast<std::size_t>(j)] == r.assignments[0]);
    CHECK(r.assignments[60] != r.assignments[0]);
    // deterministic per seed and independent of the thread count
    const auto again = kmeans(x, 2, 1, 8, 4);
    CHECK(again.assignments == r.assignments);
    CHECK(again.wcss == r.wcss);
  }

  TEST_CASE("elbow_select") {
    // normalized points (0,1) (.25,.0989) (.5,.0110) (.75,.0055) (1,0); chord
    // y = 1 - x; distance (1 - x - y)/sqrt2 is largest at k = 2
    CHECK(elbow_select({100, 10, 9, 8.5, 8}).k == 2);
    CHECK_FALSE(elbow_select({100, 10, 9, 8.5, 8}).degenerate);
    const auto flat = elbow_select({5, 5, 5, 5});
    CHECK(flat.k == 1);
    CHECK(flat.degenerate);
    CHECK(elbow_select({1000, 100, 90, 85, 80}).k == 2);  // invariant to axis scaling
    CHECK(elbow_select({10, 9, 8, 2, 1.9, 1.8}).k == 4);
    // exact tie between k = 2 and k = 3 goes to the smaller k
    CHECK(elbow_select({3, 1, 1, 0}).k == 2);
    CHECK_ERROR_CODE(elbow_select({3, 1}), ErrorCode::InvalidConfig);
  }

  TEST_CASE("wcss curve is non-increasing") {
    Rng rng(8);
    for (int trial = 0; trial < 4; ++trial) {
      PixelMatrix x(4, 120);
      for (Eigen::Index j = 0; j < 120; ++j) {
        x.col(j) = testing::random_vector(rng, 4) + Spectrum::Constant(4, 6.0 * static_cast<double>(j % 3));
      }
      const auto curve = wcss_curve(x, 8, 100 + static_cast<std::uint64_t>(trial));
      REQUIRE(curve.wcss.size() == 8);
      for (std::size_t k = 1; k < curve.wcss.size(); ++k) CHECK(curve.wcss[k] <= curve.wcss[k - 1]);
      CHECK(curve.chosen_k == 3);
    }
  }

  TEST_CASE("vca recovers simplex vertices") {
    for (int p = 3; p <= 5; ++p) {
      const auto s = simplex_mixture(p, 200, 500, 40 + static_cast<std::uint64_t>(p));
      const auto r = vca(s.pixels, p, 9);
      REQUIRE(r.endmembers.cols() == p);
      std::vector<bool> used(static_cast<std::size_t>(p), false);
      for (int k = 0; k < p; ++k) {
        double best = 10.0;
        int arg = -1;
        for (int e = 0; e < p; ++e) {
          const double a = spectral_angle(r.endmembers.col(e), s.endmembers.col(k));
          if (a < best) best = a, arg = e;
        }
        CHECK(best < 1e-6);
        CHECK_FALSE(used[static_cast<std::size_t>(arg)]);
        used[static_cast<std::size_t>(arg)] = true;
      }
      // the extracted signatures are input pixels
      for (int e = 0; e < p; ++e) {
        CHECK((r.endmembers.col(e) - s.pixels.col(r.indices[static_cast<std::size_t>(e)])).norm() == 0.0);
      }
      // same seed, same answer
      CHECK(vca(s.pixels, p, 9).indices == r.indices);
    }
  }

  TEST_CASE("vca degenerate inputs") {
    PixelMatrix same(5, 10);
    for (Eigen::Index j = 0; j < 10; ++j) same.col(j) << 1, 2, 3, 4, 5;
    const auto one = vca(same, 1, 1);
    CHECK((one.endmembers.col(0) - same.col(0)).norm() == 0.0);
    CHECK_ERROR_CODE(vca(same, 2, 1), ErrorCode::RankDeficient);
    const auto s = simplex_mixture(3, 20, 50, 2);
    CHECK(affine_dimension(s.pixels) == 2);
    CHECK_ERROR_CODE(vca(s.pixels, 5, 1), ErrorCode::RankDeficient);
  }

  TEST_CASE("similarity_row") {
    Spectrum px(1);
    px << 0.0;
    PixelMatrix cand(1, 2);
    cand << 1.0, 3.0;  // distances 1 and 3 -> (1/1, 1/3) / (4/3)
    const Spectrum g = similarity_row(px, cand);
    CHECK(g[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-15));

    cand << -1.0, 1.0;
    const Spectrum tie = similarity_row(px, cand);
    CHECK(tie[0] == 0.5);
    CHECK(tie[1] == 0.5);

    cand << 0.0, 0.0;  // zero distance: point mass on the first match
    const Spectrum hit = similarity_row(px, cand);
    CHECK(hit[0] == 1.0);
    CHECK(hit[1] == 0.0);
  }

  TEST_CASE("similarity rows sum to one and two candidates act as nearest neighbour") {
    Rng rng(21);
    for (int m = 2; m <= 6; ++m) {
      PixelMatrix cand(10, m);
      for (int c = 0; c < m; ++c) cand.col(c) = l2_normalize(testing::random_positive(rng, 10));
      for (int t = 0; t < 500; ++t) {
        const Spectrum px = l2_normalize(testing::random_positive(rng, 10));
        const Spectrum g = similarity_row(px, cand);
        CHECK(std::abs(g.sum() - 1.0) < 1e-9);
        CHECK(g.minCoeff() >= 0.0);
        if (m == 2) {
          const double d0 = (px - cand.col(0)).norm(), d1 = (px - cand.col(1)).norm();
          CHECK((g[0] > 0.5) == (d0 < d1));
          CHECK((g[1] > 0.5) == (d1 < d0));
        }
      }
    }
  }

  TEST_CASE("similarity_assign") {
    // pixels: two exact candidates, one equidistant mix, one dead pixel
    PixelMatrix px(3, 4);
    px.col(0) << 1, 0, 0;
    px.col(1) << 0, 2, 0;  // candidate 1 scaled: normalization makes it exact
    px.col(2) << 1, 1, 1;  // gamma = 1/3 each
    px.col(3) << 0, 0, 0;
    const auto cube = testing::cube_from(px, 2, 2);
    PixelMatrix cand(3, 3);
    cand.col(0) << 1, 0, 0;
    cand.col(1) << 0, 1, 0;
    cand.col(2) << 0, 0, 1;
    const ClassMap map = similarity_assign(cube, cand, 0.5, 2);
    CHECK(map.labels == std::vector<int>{0, 1, kUnassigned, kInvalidPixel});
    CHECK(map.class_counts == std::vector<std::size_t>{1, 1, 0});
    CHECK(map.unassigned_count() == 1);
    CHECK(map.class_names[1] == "class_1");
    CHECK(map.class_means[1].values[1] == doctest::Approx(2.0));  // raw mean, unassigned excluded
    CHECK_ERROR_CODE(similarity_assign(cube, cand, 1.0), ErrorCode::InvalidConfig);
  }

  TEST_CASE("isolate_class") {
    PixelMatrix px(2, 16);
    for (Eigen::Index j = 0; j < 16; ++j) px.col(j) << 1.0 + static_cast<double>(j), 1.0;
    const auto cube = testing::cube_from(px, 4, 4);
    ClassMap map;
    map.rows = map.cols = 4;
    map.class_names = {"a", "b", "c"};
    map.labels.assign(16, 0);
    const auto all = isolate_class(cube, map, 0);
    CHECK(all.indices.size() == 16);
    CHECK(all.pixels == px);
    for (std::size_t i = 0; i < 16; ++i) map.labels[i] = ((i / 4 + i % 4) % 2) ? 1 : 0;  // checkerboard
    const auto half = isolate_class(cube, map, 1);
    REQUIRE(half.indices.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t idx = half.indices[k];
      CHECK((idx / 4 + idx % 4) % 2 == 1);
      CHECK(half.pixels(0, static_cast<Eigen::Index>(k)) == 1.0 + static_cast<double>(idx));
    }
    CHECK(std::is_sorted(half.indices.begin(), half.indices.end()));
    CHECK_ERROR_CODE(isolate_class(cube, map, 2), ErrorCode::EmptyClass);
  }

  TEST_CASE("brightness ordering of candidates") {
    VcaResult r;
    r.endmembers.resize(2, 3);
    r.endmembers << 3, 1, 2, 3, 1, 2;
    r.indices = {10, 11, 12};
    sort_candidates_by_brightness(r);
    CHECK(r.indices == std::vector<Eigen::Index>{11, 12, 10});
    CHECK(r.endmembers(0, 0) == 1);
  }
}
