#include "lithomap/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lithomap/error.hpp"
#include "lithomap/project.hpp"
#include "lithomap/random.hpp"

namespace lithomap {
namespace {

Spectrum gaussian(const Spectrum& wl, double center, double width) {
  return (-0.5 * ((wl.array() - center) / width).square()).exp().matrix();
}

std::size_t even_floor(double x) {
  auto v = static_cast<std::size_t>(std::floor(x));
  return v - v % 2;
}

}  // namespace

void SceneSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); };
  if (rows == 0 || cols < 8 || bands < 4) fail("scene needs rows > 0, cols >= 8, bands >= 4");
  if (!(wavelength_min > 0.0 && wavelength_max > wavelength_min)) fail("bad wavelength range");
  if (water_rows + vegetation_rows >= rows) fail("no rows left for soil");
  if (impurity_fraction < 0.0 || mineral_fraction < 0.0 || impurity_fraction + mineral_fraction >= 1.0) {
    fail("pure-region fractions must be non-negative and sum below 1");
  }
  if (!(ramp_low >= 0.0 && ramp_low <= ramp_high && ramp_high <= 1.0)) fail("ramp must satisfy 0 <= low <= high <= 1");
  if (texture < 0.0 || lab_offset < 0.0) fail("texture and lab_offset must be non-negative");
  if (std::isnan(snr_db)) fail("snr_db is NaN");
}

SceneSpec SceneSpec::from_config(const KeyValueFile& kv) {
  SceneSpec s;
  auto size = [&](const std::string& key, std::size_t fallback) {
    const auto v = kv.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw Error(ErrorCode::InvalidSpec, key + " must be non-negative");
    return static_cast<std::size_t>(v);
  };
  s.rows = size("rows", s.rows);
  s.cols = size("cols", s.cols);
  s.bands = size("bands", s.bands);
  s.wavelength_min = kv.get_double("wavelength_min", s.wavelength_min);
  s.wavelength_max = kv.get_double("wavelength_max", s.wavelength_max);
  s.water_rows = size("water_rows", s.water_rows);
  s.vegetation_rows = size("vegetation_rows", s.vegetation_rows);
  s.impurity_fraction = kv.get_double("impurity_fraction", s.impurity_fraction);
  s.mineral_fraction = kv.get_double("mineral_fraction", s.mineral_fraction);
  s.ramp_low = kv.get_double("ramp_low", s.ramp_low);
  s.ramp_high = kv.get_double("ramp_high", s.ramp_high);
  s.texture = kv.get_double("texture", s.texture);
  s.lab_offset = kv.get_double("lab_offset", s.lab_offset);
  s.snr_db = kv.get_double("snr_db", s.snr_db);
  s.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(s.seed)));
  s.validate();
  return s;
}

SceneGenerators scene_generators(const SceneSpec& spec) {
  SceneGenerators g;
  const auto n = static_cast<Eigen::Index>(spec.bands);
  g.wavelengths = Spectrum::LinSpaced(n, spec.wavelength_min, spec.wavelength_max);
  const Spectrum& wl = g.wavelengths;
  const Eigen::ArrayXd lam = wl.array();
  const Eigen::ArrayXd ramp = (lam - 0.4) / 2.1;

  g.water = (0.10 * (-(lam - 0.4) / 0.5).exp() + 0.03).matrix();

  g.vegetation.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = lam[i];
    g.vegetation[i] = l < 0.7 ? 0.05 : (l < 0.75 ? 0.05 + 0.4 * (l - 0.7) / 0.05 : 0.45);
  }
  g.vegetation -= 0.15 * gaussian(wl, 1.45, 0.05) + 0.2 * gaussian(wl, 1.95, 0.06);

  const Spectrum base = (0.22 + 0.12 * ramp).matrix();
  const Spectrum mineral_features =
      -0.07 * gaussian(wl, 2.2, 0.06) + 0.03 * gaussian(wl, 0.9, 0.12) - 0.04 * gaussian(wl, 1.9, 0.08);
  const Spectrum impurity_features = -0.05 * gaussian(wl, 1.0, 0.15) + Spectrum(0.03 * ramp.matrix());
  g.mineral = base + mineral_features;
  g.impurity = base + impurity_features;

  // The reference differs from the site mineral by a shape term with no
  // component in span{1, mineral, impurity}, so correlation along the
  // mixing line peaks at the pure mineral.
  Eigen::MatrixXd span(n, 3);
  span.col(0).setOnes();
  span.col(1) = g.mineral;
  span.col(2) = g.impurity;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 3);
  Spectrum extra = gaussian(wl, 1.4, 0.1) - 0.5 * gaussian(wl, 0.6, 0.08);
  extra -= q * (q.transpose() * extra);
  const double centered_norm = (g.mineral.array() - g.mineral.mean()).matrix().norm();
  g.lab = g.mineral;
  if (extra.norm() > 0.0) g.lab += spec.lab_offset * centered_norm / extra.norm() * extra;
  return g;
}

std::vector<std::size_t> Scene::soil_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    if (truth.labels[i] == kTruthSoil) out.push_back(i);
  }
  return out;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.generators = scene_generators(spec);
  const SceneGenerators& g = scene.generators;
  HyperspectralCube& cube = scene.cube;
  cube = HyperspectralCube(spec.rows, spec.cols, spec.bands);
  cube.units = Units::Reflectance;
  cube.sample_type = SampleType::Float32;
  for (std::size_t b = 0; b < spec.bands; ++b) cube.wavelengths[b] = g.wavelengths[static_cast<Eigen::Index>(b)];

  const std::size_t n_impurity = even_floor(spec.impurity_fraction * static_cast<double>(spec.cols));
  const std::size_t n_mineral = even_floor(spec.mineral_fraction * static_cast<double>(spec.cols));
  const std::size_t ramp_begin = n_impurity;
  const std::size_t ramp_end = spec.cols - n_mineral;  // exclusive
  auto column_alpha = [&](std::size_t col) {
    if (col < ramp_begin) return 0.0;
    if (col >= ramp_end) return 1.0;
    if (ramp_end - ramp_begin == 1) return 0.5 * (spec.ramp_low + spec.ramp_high);
    const double t = static_cast<double>(col - ramp_begin) / static_cast<double>(ramp_end - ramp_begin - 1);
    return spec.ramp_low + t * (spec.ramp_high - spec.ramp_low);
  };

  const Spectrum axis = g.mineral - g.impurity;
  const Spectrum unit_axis = axis.normalized();
  const double texture_norm = spec.texture * axis.norm();
  Rng texture_rng(Rng::mix(spec.seed, 1));

  scene.truth.rows = spec.rows;
  scene.truth.cols = spec.cols;
  scene.truth.labels.assign(spec.rows * spec.cols, kTruthSoil);
  scene.truth.class_names = {"water", "vegetation", "soil"};
  scene.alpha.assign(spec.rows * spec.cols, std::numeric_limits<double>::quiet_NaN());

  std::vector<Spectrum> values(spec.rows * spec.cols);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const std::size_t idx = r * spec.cols + c;
      if (r < spec.water_rows) {
        scene.truth.labels[idx] = kTruthWater;
        values[idx] = g.water;
      } else if (r < spec.water_rows + spec.vegetation_rows) {
        scene.truth.labels[idx] = kTruthVegetation;
        values[idx] = g.vegetation;
      } else {
        const double a = column_alpha(c);
        scene.alpha[idx] = a;
        values[idx] = a * g.mineral + (1.0 - a) * g.impurity;
      }
    }
    if (r < spec.water_rows + spec.vegetation_rows || texture_norm == 0.0) continue;
    for (std::size_t c = 0; c + 1 < spec.cols; c += 2) {
      Spectrum e(static_cast<Eigen::Index>(spec.bands));
      for (Eigen::Index b = 0; b < e.size(); ++b) e[b] = texture_rng.normal();
      e -= e.dot(unit_axis) * unit_axis;
      e *= texture_norm / e.norm();
      values[r * spec.cols + c] += e;
      values[r * spec.cols + c + 1] -= e;
    }
  }

  double noise_sigma = 0.0;
  if (std::isfinite(spec.snr_db)) {
    double power = 0.0;
    for (const auto& v : values) power += v.squaredNorm();
    power /= static_cast<double>(spec.rows * spec.cols * spec.bands);
    noise_sigma = std::sqrt(power / std::pow(10.0, spec.snr_db / 10.0));
  }
  Rng noise_rng(Rng::mix(spec.seed, 2));
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    auto px = cube.pixel(idx);
    for (std::size_t b = 0; b < spec.bands; ++b) {
      double v = values[idx][static_cast<Eigen::Index>(b)];
      if (noise_sigma > 0.0) v += noise_sigma * noise_rng.normal();
      px[b] = static_cast<float>(v);
    }
  }
  cube.refresh_validity();

  scene.truth.class_counts.assign(3, 0);
  for (int label : scene.truth.labels) ++scene.truth.class_counts[static_cast<std::size_t>(label)];
  const Spectrum* means[3] = {&g.water, &g.vegetation, nullptr};
  for (int k = 0; k < 3; ++k) {
    SpectralSignature sig;
    sig.wavelengths = g.wavelengths;
    sig.values = means[k] ? *means[k] : Spectrum(0.5 * (g.mineral + g.impurity));
    sig.label = scene.truth.class_names[static_cast<std::size_t>(k)];
    sig.provenance = Provenance::Extracted;
    scene.truth.class_means.push_back(std::move(sig));
  }
  return scene;
}

double grid_search_alpha(const SpectrumRef& s, const SpectrumRef& m, const SpectrumRef& r, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidConfig, "grid step must be positive");
  if (s.size() != m.size() || s.size() != r.size()) throw Error(ErrorCode::LengthMismatch, "grid search inputs");
  const auto steps = static_cast<std::size_t>(std::floor(1.0 / step));
  double best_alpha = 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double a) {
    const double cost = 0.5 * (a * m + (1.0 - a) * r - s).squaredNorm();
    if (cost < best) {
      best = cost;
      best_alpha = a;
    }
  };
  for (std::size_t k = 0; k <= steps; ++k) consider(std::min(1.0, static_cast<double>(k) * step));
  consider(1.0);
  return best_alpha;
}

double max_fisher_ratio(const PixelMatrix& mineral, const PixelMatrix& impurity, const PixelMatrix& directions) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    best = std::max(best, fisher_ratio(directions.col(i), mineral, impurity));
  }
  return best;
}

double random_direction_fisher(const PixelMatrix& mineral, const PixelMatrix& impurity, int n_draws,
                               std::uint64_t seed) {
  Rng rng(seed);
  PixelMatrix dirs(mineral.rows(), std::max(0, n_draws));
  for (Eigen::Index i = 0; i < dirs.cols(); ++i) {
    for (Eigen::Index b = 0; b < dirs.rows(); ++b) dirs(b, i) = rng.normal();
    dirs.col(i).normalize();
  }
  return max_fisher_ratio(mineral, impurity, dirs);
}

TwoClassSample two_gaussian_classes(std::size_t n_a, std::size_t n_b, std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(dims);
  TwoClassSample s;
  s.mixing.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) s.mixing(i, j) = rng.normal() / std::sqrt(static_cast<double>(d));
  }
  s.mixing.diagonal().array() += 0.5;
  Spectrum mean_b(d);
  for (Eigen::Index i = 0; i < d; ++i) mean_b[i] = 0.5 * rng.normal();
  auto draw = [&](std::size_t n, const Spectrum& mean) {
    PixelMatrix out(d, static_cast<Eigen::Index>(n));
    Spectrum z(d);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
      out.col(j) = mean + s.mixing * z;
    }
    return out;
  };
  s.a = draw(n_a, Spectrum::Zero(d));
  s.b = draw(n_b, mean_b);
  return s;
}

SimplexSample simplex_mixture(int p, std::size_t bands, std::size_t n, std::uint64_t seed) {
  if (p < 1 || n < static_cast<std::size_t>(p)) throw Error(ErrorCode::InvalidSpec, "simplex needs n >= p >= 1");
  Rng rng(seed);
  const auto nb = static_cast<Eigen::Index>(bands);
  SimplexSample s;
  s.endmembers.resize(nb, p);
  for (int k = 0; k < p; ++k) {
    // smooth positive spectra: a few random bumps on a floor
    const double floor = 0.05 + 0.3 * rng.uniform();
    for (Eigen::Index b = 0; b < nb; ++b) s.endmembers(b, k) = floor;
    for (int bump = 0; bump < 4; ++bump) {
      const double center = rng.uniform() * static_cast<double>(nb);
      const double width = 3.0 + 0.1 * static_cast<double>(nb) * rng.uniform();
      const double height = 0.4 * rng.uniform();
      for (Eigen::Index b = 0; b < nb; ++b) {
        s.endmembers(b, k) += height * std::exp(-0.5 * std::pow((static_cast<double>(b) - center) / width, 2));
      }
    }
  }
  // pure pixels at seeded, distinct positions
  std::vector<std::size_t> slots(n);
  for (std::size_t i = 0; i < n; ++i) slots[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) std::swap(slots[i], slots[rng.index(i + 1)]);
  std::vector<int> pure_of(n, -1);
  for (int k = 0; k < p; ++k) pure_of[slots[static_cast<std::size_t>(k)]] = k;

  s.pixels.resize(nb, static_cast<Eigen::Index>(n));
  Spectrum weights(p);
  for (std::size_t j = 0; j < n; ++j) {
    if (pure_of[j] >= 0) {
      s.pixels.col(static_cast<Eigen::Index>(j)) = s.endmembers.col(pure_of[j]);
      continue;
    }
    // flat Dirichlet via normalized exponentials, kept off the vertices
    for (int k = 0; k < p; ++k) weights[k] = -std::log(1.0 - rng.uniform()) + 0.05;
    weights /= weights.sum();
    s.pixels.col(static_cast<Eigen::Index>(j)) = s.endmembers * weights;
  }
  return s;
}

}  // namespace lithomap
