#include <cmath>

#include "helpers.hpp"
#include "lithomap/project.hpp"
#include "lithomap/synth.hpp"

using namespace lithomap;

namespace {

// Four points at mean +/- a e0, mean +/- b e1: scatter diag(2a^2, 2b^2).
PixelMatrix cross(const Spectrum& mean, double a, double b) {
  PixelMatrix x(2, 4);
  x.col(0) = mean + Spectrum((Spectrum(2) << a, 0).finished());
  x.col(1) = mean - Spectrum((Spectrum(2) << a, 0).finished());
  x.col(2) = mean + Spectrum((Spectrum(2) << 0, b).finished());
  x.col(3) = mean - Spectrum((Spectrum(2) << 0, b).finished());
  return x;
}

double angle_deg(const Spectrum& a, const Spectrum& b) {
  return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized())))) * 180.0 / M_PI;
}

}  // namespace

TEST_SUITE("project") {
  TEST_CASE("fisher direction hand examples") {
    // identity-shaped scatter, means differ along band 0 only -> w = +e0
    PixelMatrix ms(3, 6), is(3, 6);
    for (Eigen::Index k = 0; k < 3; ++k) {
      ms.col(2 * k) = Spectrum::Unit(3, k);
      ms.col(2 * k + 1) = -Spectrum::Unit(3, k);
    }
    is = ms;
    ms.row(0).array() += 2.0;
    const auto f = fisher_direction(ms, is);
    CHECK(f.w[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f.w[1]) < 1e-12);
    CHECK(std::abs(f.w.norm() - 1.0) < 1e-12);
    CHECK(f.mu_mineral_proj > f.mu_impurity_proj);

    // S_w = diag(2, 1), delta mu = (1, 1) -> w = (1, 2)/sqrt(5)
    const Spectrum mu_m = (Spectrum(2) << 1, 1).finished();
    const PixelMatrix a = cross(mu_m, std::sqrt(0.5), 0.5);
    const PixelMatrix b = cross(Spectrum::Zero(2), std::sqrt(0.5), 0.5);
    const Eigen::MatrixXd sw = within_class_scatter(a, b);
    CHECK(sw(0, 0) == doctest::Approx(2.0));
    CHECK(sw(1, 1) == doctest::Approx(1.0));
    const auto g = fisher_direction(a, b);
    CHECK(g.w[0] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-5));
    CHECK(g.w[1] == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-5));

    // orientation follows the mineral class
    const auto flipped = fisher_direction(b, a);
    CHECK(flipped.w[0] < 0.0);
  }

  TEST_CASE("fisher ratio dominates random directions") {
    const auto s = two_gaussian_classes(300, 300, 12, 5);
    const auto f = fisher_direction(s.a, s.b);
    const double oracle = random_direction_fisher(s.a, s.b, 500, 6);
    CHECK(f.fisher_ratio >= oracle);
    CHECK(fisher_ratio(f.w, s.a, s.b) == doctest::Approx(f.fisher_ratio).epsilon(1e-12));
    // a single "random" direction equal to w reproduces the ratio
    CHECK(max_fisher_ratio(s.a, s.b, f.w) == doctest::Approx(f.fisher_ratio).epsilon(1e-12));
    // identical classes: nothing separates them
    CHECK(random_direction_fisher(s.a, s.a, 50, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("fisher direction is rotation equivariant") {
    const auto s = two_gaussian_classes(200, 150, 6, 9);
    Rng rng(2);
    Eigen::MatrixXd raw(6, 6);
    for (Eigen::Index i = 0; i < 36; ++i) raw.data()[i] = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
    const auto f = fisher_direction(s.a, s.b);
    const auto fr = fisher_direction(q * s.a, q * s.b);
    CHECK((fr.w - q * f.w).norm() < 1e-8);
    CHECK(fr.mu_mineral_proj == doctest::Approx(f.mu_mineral_proj).epsilon(1e-9));
  }

  TEST_CASE("spherical classes converge to the mean difference") {
    Rng rng(31);
    const Eigen::Index d = 5;
    const Spectrum delta = testing::random_vector(rng, d);
    PixelMatrix a(d, 5000), b(d, 5000);
    for (Eigen::Index j = 0; j < 5000; ++j) {
      a.col(j) = delta + testing::random_vector(rng, d);
      b.col(j) = testing::random_vector(rng, d);
    }
    CHECK(angle_deg(fisher_direction(a, b).w, delta) < 5.0);
  }

  TEST_CASE("relative availability") {
    CHECK(relative_availability(0.2, 0.8) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(relative_availability(0.3, 0.3) == 0.5);
    CHECK(relative_availability(0.0, 0.7) == 1.0);
    CHECK(relative_availability(0.7, 0.0) == 0.0);
  }

  TEST_CASE("project_soil") {
    RepresentativePair reps;
    reps.mineral = (Spectrum(2) << 1, 0).finished();
    reps.impurity = (Spectrum(2) << 0, 0).finished();
    FisherDirection dir;
    dir.w = (Spectrum(2) << 1, 0).finished();
    PixelMatrix px(2, 6);
    px << 1, 0, 0.5, 0.25, 0.75, 2, 5, 5, 5, 5, 5, 5;
    const auto p = project_soil(px, reps, dir);
    CHECK(p[0].ra == 1.0);
    CHECK(p[1].ra == 0.0);
    CHECK(p[2].ra == 0.5);
    CHECK(p[3].ra < p[2].ra);
    CHECK(p[2].ra < p[4].ra);  // monotone between the projections
    CHECK(p[5].ra >= 0.0);
    CHECK(p[5].ra <= 1.0);

    RepresentativePair swapped{reps.impurity, reps.mineral};
    const auto q = project_soil(px, swapped, dir);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k].ra + q[k].ra == doctest::Approx(1.0));

    dir.w = (Spectrum(2) << 0, 1).finished();
    CHECK_ERROR_CODE(project_soil(px, reps, dir), ErrorCode::DegenerateRepresentatives);
  }

  TEST_CASE("separation_report") {
    std::vector<ProjectedPixel> proj(4);
    proj[0].t = 0.0;
    proj[1].t = 0.0;
    proj[2].t = 1.0;
    proj[3].t = 1.0;
    SubclassMap m;
    m.labels = {Subclass::Impurity, Subclass::Impurity, Subclass::Mineral, Subclass::Mineral};
    const auto r = separation_report(proj, m);
    CHECK(r.mean_gap == 1.0);
    CHECK(r.mineral.count == 2);
    m.labels = {Subclass::Impurity, Subclass::Mineral, Subclass::Impurity, Subclass::Mineral};
    const auto same = separation_report(proj, m);
    CHECK(same.mean_gap == 0.0);
    CHECK(same.normalized_gap == 0.0);
  }
}
