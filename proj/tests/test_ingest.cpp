#include <cmath>
#include <fstream>
#include <numbers>

#include "helpers.hpp"
#include "lithomap/ingest.hpp"

using namespace lithomap;

namespace {

constexpr double kJaffnaDistance = 1.010189776177688;
constexpr double kJaffnaZenith = 28.543857;

RadiometricParams flat_params(std::size_t bands, double esun, double scale) {
  RadiometricParams p;
  p.earth_sun_distance = kJaffnaDistance;
  p.solar_zenith_deg = kJaffnaZenith;
  p.esun.assign(bands, esun);
  p.radiance_scale.assign(bands, scale);
  return p;
}

HyperspectralCube radiance_cube(std::size_t rows, std::size_t cols, std::size_t bands, std::uint64_t seed) {
  HyperspectralCube c(rows, cols, bands);
  c.units = Units::Radiance;
  c.sample_type = SampleType::Int16;
  for (std::size_t b = 0; b < bands; ++b) c.wavelengths[b] = 0.4 + 0.01 * static_cast<double>(b);
  Rng rng(seed);
  for (auto& v : c.data) v = static_cast<float>(100 + rng.index(4000));
  c.refresh_validity();
  return c;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("toa_reflectance hand examples") {
    CHECK(toa_reflectance(0.0, 1000.0, kJaffnaDistance, kJaffnaZenith) == 0.0);
    // pi * 100 * d^2 / (1000 * cos(theta)) evaluated by hand
    CHECK(toa_reflectance(100.0, 1000.0, kJaffnaDistance, kJaffnaZenith) == doctest::Approx(0.3650).epsilon(3e-4));
    CHECK(std::abs(toa_reflectance(100.0, 1000.0, kJaffnaDistance, kJaffnaZenith) - 0.364954) < 1e-6);
    // identity construction
    const double esun = 1234.5;
    const double L = esun * std::cos(kJaffnaZenith * std::numbers::pi / 180.0) /
                     (std::numbers::pi * kJaffnaDistance * kJaffnaDistance);
    CHECK(std::abs(toa_reflectance(L, esun, kJaffnaDistance, kJaffnaZenith) - 1.0) < 1e-12);
  }

  TEST_CASE("to_reflectance on a cube") {
    HyperspectralCube c = radiance_cube(3, 4, 5, 1);
    c.at(0, 0, 1) = -40.0f;  // negative radiance gets clamped
    c.band_mask[4] = 0;
    const auto p = flat_params(5, 1000.0, 40.0);
    const auto r = to_reflectance(c, p);
    CHECK(r.cube.units == Units::Reflectance);
    CHECK(r.cube.sample_type == SampleType::Float32);
    CHECK(r.clamped_count == 1);
    CHECK(r.cube.at(0, 0, 1) == 0.0f);
    CHECK(r.cube.at(2, 3, 4) == 0.0f);  // masked band
    const double expect = toa_reflectance(c.at(1, 2, 3) / 40.0, 1000.0, kJaffnaDistance, kJaffnaZenith);
    CHECK(r.cube.at(1, 2, 3) == doctest::Approx(expect).epsilon(1e-6));

    // linear in L before clamping
    HyperspectralCube doubled = radiance_cube(3, 4, 5, 1);
    for (auto& v : doubled.data) v *= 2.0f;
    const auto r2 = to_reflectance(doubled, p);
    const auto r1 = to_reflectance(radiance_cube(3, 4, 5, 1), p);
    for (std::size_t i = 0; i < r1.cube.data.size(); ++i) {
      CHECK(r2.cube.data[i] == doctest::Approx(2.0 * r1.cube.data[i]).epsilon(1e-6));
    }

    // thread count does not change the output
    CHECK(to_reflectance(c, p, 4).cube.data == r.cube.data);
  }

  TEST_CASE("to_reflectance errors") {
    HyperspectralCube c = radiance_cube(2, 2, 3, 2);
    auto p = flat_params(3, 1000.0, 40.0);
    HyperspectralCube refl = c;
    refl.units = Units::Reflectance;
    CHECK_ERROR_CODE(to_reflectance(refl, p), ErrorCode::AlreadyReflectance);
    auto below = p;
    below.solar_zenith_deg = 90.0;
    CHECK_ERROR_CODE(to_reflectance(c, below), ErrorCode::SunBelowHorizon);
    auto no_esun = p;
    no_esun.esun[1] = 0.0;
    CHECK_ERROR_CODE(to_reflectance(c, no_esun), ErrorCode::MissingEsun);
    c.band_mask[1] = 0;  // missing ESUN is fine on a dropped band
    CHECK_NOTHROW(to_reflectance(c, no_esun));
  }

  TEST_CASE("correlation is invariant to a global radiance scale") {
    HyperspectralCube c = radiance_cube(1, 6, 30, 9);
    Rng rng(4);
    const Spectrum lab = testing::random_positive(rng, 30);
    const auto a = to_reflectance(c, flat_params(30, 1500.0, 40.0)).cube;
    const auto b = to_reflectance(c, flat_params(30, 1500.0, 73.0)).cube;
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(pearson_correlation(a.masked_pixel(i), lab) ==
            doctest::Approx(pearson_correlation(b.masked_pixel(i), lab)).epsilon(1e-6));
    }
  }

  TEST_CASE("radiometric parameter files") {
    const auto dir = testing::scratch_dir("radiometry");
    write_text(dir / "esun.csv", "band,esun\n0,1000\n1,1100\n2,1200\n");
    write_text(dir / "p.cfg",
               "earth_sun_distance = 1.01\nsolar_zenith_deg = 30\nradiance_scale = 0-1:40,2:80\nesun_file = esun.csv\n");
    const auto p = load_radiometric_params(dir / "p.cfg", 3);
    CHECK(p.radiance_scale == std::vector<double>{40, 40, 80});
    CHECK(p.esun == std::vector<double>{1000, 1100, 1200});

    write_text(dir / "missing.cfg", "earth_sun_distance = 1.01\nsolar_zenith_deg = 30\nesun_file = nowhere.csv\n");
    CHECK_ERROR_CODE(load_radiometric_params(dir / "missing.cfg", 3), ErrorCode::MissingEsun);

    // the shipped scene geometry files parse and carry the VNIR/SWIR split
    const std::filesystem::path data = std::filesystem::path(LITHOMAP_SOURCE_DIR) / "data";
    const auto jaffna = load_radiometric_params(data / "hyperion_jaffna_2005132.cfg", 242);
    CHECK(jaffna.earth_sun_distance == kJaffnaDistance);
    CHECK(jaffna.solar_zenith_deg == kJaffnaZenith);
    CHECK(jaffna.radiance_scale[69] == 40.0);
    CHECK(jaffna.radiance_scale[70] == 80.0);
    CHECK(std::all_of(jaffna.esun.begin(), jaffna.esun.end(), [](double e) { return e > 0.0; }));
  }

  TEST_CASE("library signatures") {
    const auto dir = testing::scratch_dir("library");
    write_text(dir / "two.csv", "wavelength_um,reflectance\n0.4,0.1\n2.5,0.9\n");
    const auto two = load_library_signature(dir / "two.csv");
    CHECK(two.signature.size() == 2);
    CHECK(two.signature.label == "two");
    CHECK(two.dropped_rows == 0);

    write_text(dir / "desc.csv", "wavelength_um,reflectance\n2.5,0.1\n0.4,0.9\n");
    CHECK_ERROR_CODE(load_library_signature(dir / "desc.csv"), ErrorCode::NonMonotonicWavelengths);

    write_text(dir / "holes.csv", "wavelength_um,reflectance\n0.4,0.1\n0.5,nan\n0.6,-\n0.7,0.3\n");
    const auto holes = load_library_signature(dir / "holes.csv");
    CHECK(holes.signature.size() == 2);
    CHECK(holes.dropped_rows == 2);

    write_text(dir / "empty.csv", "wavelength_um,reflectance\n");
    CHECK_ERROR_CODE(load_library_signature(dir / "empty.csv"), ErrorCode::EmptyLibrary);

    // 480-channel file, 0.2-3.0 um
    std::string text = "wavelength_um,reflectance\n";
    for (int i = 0; i < 480; ++i) text += std::to_string(0.2 + 2.8 * i / 479.0) + ",0.5\n";
    write_text(dir / "wide.csv", text);
    CHECK(load_library_signature(dir / "wide.csv").signature.size() == 480);

    // write/read round trip
    write_library_csv(dir / "rt.csv", two.signature);
    CHECK(load_library_signature(dir / "rt.csv").signature.values == two.signature.values);
  }

  TEST_CASE("band masks") {
    HyperspectralCube c(1, 1, 242);
    for (std::size_t b = 0; b < 242; ++b) c.wavelengths[b] = 0.4 + 0.01 * static_cast<double>(b);
    std::fill(c.data.begin(), c.data.end(), 1.0f);
    apply_band_mask(c, "");
    CHECK(c.usable_bands().size() == 242);
    apply_band_mask(c, "0-6");
    CHECK(c.usable_bands().size() == 235);
    HyperspectralCube d(1, 1, 242);
    std::fill(d.data.begin(), d.data.end(), 1.0f);
    apply_band_mask(d, "5-10,0-6,8-9");  // overlapping ranges drop 0..10 once
    CHECK(d.usable_bands().size() == 231);
    CHECK(band_mask_spec(d.band_mask) == "0-10");
    CHECK_ERROR_CODE(apply_band_mask(d, "240-242"), ErrorCode::RangeOutOfBounds);
    CHECK_ERROR_CODE(apply_band_mask(d, "7-3"), ErrorCode::InvalidConfig);

    const auto ranges = parse_band_mask_spec("224-241, 0-6,57-75");
    REQUIRE(ranges.size() == 3);
    CHECK(ranges[0].first == 0);
    CHECK(ranges[2].last == 241);
    HyperspectralCube h(1, 1, 242);
    std::fill(h.data.begin(), h.data.end(), 1.0f);
    apply_band_mask(h, "0-6,57-75,224-241");
    CHECK(h.usable_bands().size() == 242 - 7 - 19 - 18);
    CHECK(band_mask_spec(h.band_mask) == "0-6,57-75,224-241");
  }

  TEST_CASE("pixel validity") {
    HyperspectralCube c(1, 3, 2);
    c.wavelengths = {0.5, 0.6};
    c.data = {0.0f, 0.0f, 1.0f, NAN, 0.3f, 0.4f};
    c.refresh_validity();
    CHECK(c.valid_pixels() == std::vector<std::size_t>{2});
    c.band_mask[1] = 0;  // NaN only in a dropped band: pixel 1 becomes valid
    c.refresh_validity();
    CHECK(c.valid_pixels() == std::vector<std::size_t>{1, 2});
  }
}
