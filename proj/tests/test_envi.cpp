#include <cstring>
#include <fstream>

#include "helpers.hpp"
#include "lithomap/envi.hpp"

using namespace lithomap;

namespace {

HyperspectralCube random_cube(std::size_t rows, std::size_t cols, std::size_t bands, std::uint64_t seed) {
  HyperspectralCube c(rows, cols, bands);
  for (std::size_t b = 0; b < bands; ++b) c.wavelengths[b] = 0.4 + 0.0087 * static_cast<double>(b);
  Rng rng(seed);
  for (auto& v : c.data) v = static_cast<float>(rng.normal());
  c.band_mask[bands / 2] = 0;
  return c;
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_SUITE("envi") {
  TEST_CASE("float cubes round-trip bit-exactly in every interleave") {
    const auto dir = testing::scratch_dir("envi_rt");
    const HyperspectralCube c = random_cube(2, 2, 3, 1);
    HyperspectralCube first;
    for (Interleave il : {Interleave::Bsq, Interleave::Bil, Interleave::Bip}) {
      const auto hdr = dir / ("c_" + interleave_name(il) + ".hdr");
      write_envi(c, hdr, data_path_for(hdr), il);
      const HyperspectralCube back = read_envi(hdr, data_path_for(hdr));
      CHECK(bit_equal(back.data, c.data));
      CHECK(back.wavelengths == c.wavelengths);
      CHECK(back.band_mask == c.band_mask);
      CHECK(back.units == Units::Reflectance);
      CHECK(EnviHeader::load(hdr).interleave == il);
    }
  }

  TEST_CASE("int16 radiance cubes round-trip") {
    const auto dir = testing::scratch_dir("envi_int");
    HyperspectralCube c(3, 2, 4);
    for (std::size_t b = 0; b < 4; ++b) c.wavelengths[b] = 0.5 + 0.1 * static_cast<double>(b);
    c.units = Units::Radiance;
    c.sample_type = SampleType::Int16;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = static_cast<float>(static_cast<int>(i) * 37 - 200);
    write_envi(c, dir / "r.hdr", dir / "r.img", Interleave::Bil);
    const auto back = read_envi(dir / "r.hdr", dir / "r.img");
    CHECK(back.sample_type == SampleType::Int16);
    CHECK(back.units == Units::Radiance);
    CHECK(back.data == c.data);
  }

  TEST_CASE("corrupt inputs") {
    const auto dir = testing::scratch_dir("envi_bad");
    HyperspectralCube c = random_cube(2, 3, 242, 4);
    write_envi(c, dir / "c.hdr", dir / "c.img");
    // truncate the payload to 240 bands
    std::filesystem::resize_file(dir / "c.img", 2 * 3 * 240 * 4);
    CHECK_ERROR_CODE(read_envi(dir / "c.hdr", dir / "c.img"), ErrorCode::SizeMismatch);

    write_text(dir / "t.hdr", "ENVI\nsamples = 1\nlines = 1\nbands = 1\ndata type = 5\ninterleave = bsq\nbyte order = 0\n");
    write_text(dir / "t.img", std::string(8, '\0'));
    CHECK_ERROR_CODE(read_envi(dir / "t.hdr", dir / "t.img"), ErrorCode::UnsupportedDataType);

    write_text(dir / "m.hdr", "ENVI\nsamples = 1\nlines = 1\ndata type = 4\ninterleave = bsq\nbyte order = 0\n");
    CHECK_ERROR_CODE(read_envi(dir / "m.hdr", dir / "t.img"), ErrorCode::MalformedHeader);
    write_text(dir / "n.hdr", "not a header\n");
    CHECK_ERROR_CODE(EnviHeader::load(dir / "n.hdr"), ErrorCode::MalformedHeader);
  }

  TEST_CASE("header parsing") {
    const auto h = EnviHeader::parse(
        "ENVI\ndescription = {a\nmultiline note}\nSamples = 4\nlines = 2\nbands = 3\nheader offset = 0\n"
        "data type = 2\ninterleave = BIL\nbyte order = 1\nwavelength units = Nanometers\n"
        "wavelength = {400.0, 500.0,\n 600.0}\n");
    CHECK(h.samples == 4);
    CHECK(h.lines == 2);
    CHECK(h.interleave == Interleave::Bil);
    CHECK(h.byte_order == 1);
    REQUIRE(h.wavelengths.size() == 3);
    CHECK(h.wavelengths[2] == doctest::Approx(0.6));
  }

  TEST_CASE("big-endian payload") {
    const auto dir = testing::scratch_dir("envi_be");
    write_text(dir / "b.hdr",
               "ENVI\nsamples = 2\nlines = 1\nbands = 1\ndata type = 2\ninterleave = bsq\nbyte order = 1\n"
               "units = radiance\nwavelength = {0.5}\n");
    const char bytes[] = {0x01, 0x02, static_cast<char>(0xFF), static_cast<char>(0xFE)};
    std::ofstream(dir / "b.img", std::ios::binary).write(bytes, 4);
    const auto c = read_envi(dir / "b.hdr", dir / "b.img");
    CHECK(c.data[0] == 258.0f);
    CHECK(c.data[1] == -2.0f);
  }

  TEST_CASE("single-band rasters") {
    const auto dir = testing::scratch_dir("envi_raster");
    Raster r;
    r.rows = 2;
    r.cols = 3;
    r.type = RasterType::Float32;
    r.values = {0.25, -1, 0.5, 1, 0, 0.125};
    write_raster(r, dir / "f.hdr", dir / "f.img");
    const Raster back = read_raster(dir / "f.hdr", dir / "f.img");
    CHECK(back.values == r.values);
    CHECK(back.at(1, 2) == 0.125);
    r.type = RasterType::UInt8;
    r.values = {0, 1, 2, 254, 255, 7};
    write_raster(r, dir / "u.hdr", dir / "u.img");
    CHECK(read_raster(dir / "u.hdr", dir / "u.img").values == r.values);
    CHECK(std::filesystem::file_size(dir / "u.img") == 6);
  }
}
