#include "lithomap/envi.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lithomap/error.hpp"
#include "lithomap/keyvalue.hpp"

namespace lithomap {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <typename T>
T byteswap_value(T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

constexpr bool kHostLittle = std::endian::native == std::endian::little;

std::size_t header_size(const EnviHeader& h, const std::string& key) {
  auto it = h.fields.find(key);
  if (it == h.fields.end()) throw Error(ErrorCode::MalformedHeader, "missing required key '" + key + "'");
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (v < 0 || trim(it->second.substr(used)).size() != 0) throw std::invalid_argument("bad");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedHeader, "key '" + key + "' is not a non-negative integer");
  }
}

// Offset of sample (line, sample, band) in the file, in samples.
std::size_t file_index(Interleave il, std::size_t lines, std::size_t samples, std::size_t bands, std::size_t line,
                       std::size_t sample, std::size_t band) {
  switch (il) {
    case Interleave::Bsq: return (band * lines + line) * samples + sample;
    case Interleave::Bil: return (line * bands + band) * samples + sample;
    case Interleave::Bip: return (line * samples + sample) * bands + band;
  }
  return 0;
}

std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<char> buf(size);
  if (size > 0 && !in.read(buf.data(), static_cast<std::streamsize>(size))) {
    throw Error(ErrorCode::IoFailure, "short read from " + path.string());
  }
  return buf;
}

std::string format_list(const std::vector<double>& values) {
  std::ostringstream out;
  out.precision(17);
  out << '{';
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? ", " : "") << values[i];
  out << '}';
  return out.str();
}

}  // namespace

std::string interleave_name(Interleave i) {
  switch (i) {
    case Interleave::Bsq: return "bsq";
    case Interleave::Bil: return "bil";
    case Interleave::Bip: return "bip";
  }
  return "bsq";
}

Interleave parse_interleave(const std::string& s) {
  const std::string t = lower(trim(s));
  if (t == "bsq") return Interleave::Bsq;
  if (t == "bil") return Interleave::Bil;
  if (t == "bip") return Interleave::Bip;
  throw Error(ErrorCode::MalformedHeader, "unknown interleave '" + s + "'");
}

EnviHeader EnviHeader::parse(const std::string& text) {
  EnviHeader h;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || lower(t) == "envi" || t.front() == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::MalformedHeader, "line without '=': " + t);
    const std::string key = lower(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));
    if (!value.empty() && value.front() == '{') {
      while (value.find('}') == std::string::npos) {
        std::string more;
        if (!std::getline(in, more)) throw Error(ErrorCode::MalformedHeader, "unterminated '{' for " + key);
        value += " " + trim(more);
      }
      value = trim(value.substr(1, value.find('}') - 1));
    }
    h.fields[key] = value;
  }

  h.samples = header_size(h, "samples");
  h.lines = header_size(h, "lines");
  h.bands = header_size(h, "bands");
  if (h.samples == 0 || h.lines == 0 || h.bands == 0) throw Error(ErrorCode::MalformedHeader, "zero-sized cube");
  h.data_type = static_cast<int>(header_size(h, "data type"));
  h.byte_order = static_cast<int>(header_size(h, "byte order"));
  if (h.byte_order != 0 && h.byte_order != 1) throw Error(ErrorCode::MalformedHeader, "byte order must be 0 or 1");
  auto il = h.fields.find("interleave");
  if (il == h.fields.end()) throw Error(ErrorCode::MalformedHeader, "missing required key 'interleave'");
  h.interleave = parse_interleave(il->second);
  if (h.fields.count("header offset")) h.header_offset = header_size(h, "header offset");

  if (auto wl = h.fields.find("wavelength"); wl != h.fields.end()) {
    for (const auto& item : split(wl->second, ',')) {
      if (item.empty()) continue;
      try {
        h.wavelengths.push_back(parse_double(item, "wavelength"));
      } catch (const Error&) {
        throw Error(ErrorCode::MalformedHeader, "bad wavelength entry '" + item + "'");
      }
    }
    if (h.wavelengths.size() != h.bands) {
      throw Error(ErrorCode::MalformedHeader, "wavelength list has " + std::to_string(h.wavelengths.size()) +
                                                  " entries for " + std::to_string(h.bands) + " bands");
    }
    // nanometer headers
    if (auto units = h.fields.find("wavelength units");
        units != h.fields.end() && lower(units->second).rfind("nano", 0) == 0) {
      for (auto& w : h.wavelengths) w /= 1000.0;
    }
  }
  return h;
}

EnviHeader EnviHeader::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::size_t EnviHeader::bytes_per_sample() const {
  switch (data_type) {
    case 1: return 1;
    case 2: return 2;
    case 4: return 4;
    default: throw Error(ErrorCode::UnsupportedDataType, "ENVI data type " + std::to_string(data_type));
  }
}

namespace {

// Decode the payload into row-major BIP doubles-as-float storage.
std::vector<float> decode_samples(const EnviHeader& h, const std::vector<char>& raw) {
  const std::size_t bps = h.bytes_per_sample();
  const std::size_t count = h.samples * h.lines * h.bands;
  const std::size_t expected = h.header_offset + count * bps;
  if (raw.size() != expected) {
    throw Error(ErrorCode::SizeMismatch, "data file has " + std::to_string(raw.size()) + " bytes, header implies " +
                                             std::to_string(expected));
  }
  const bool swap = (h.byte_order == 1) == kHostLittle;
  const char* base = raw.data() + h.header_offset;
  std::vector<float> out(count);
  for (std::size_t line = 0; line < h.lines; ++line) {
    for (std::size_t s = 0; s < h.samples; ++s) {
      for (std::size_t b = 0; b < h.bands; ++b) {
        const std::size_t src = file_index(h.interleave, h.lines, h.samples, h.bands, line, s, b) * bps;
        float value = 0.0f;
        if (h.data_type == 1) {
          value = static_cast<float>(static_cast<unsigned char>(base[src]));
        } else if (h.data_type == 2) {
          std::int16_t v;
          std::memcpy(&v, base + src, 2);
          if (swap) v = byteswap_value(v);
          value = static_cast<float>(v);
        } else {
          std::memcpy(&value, base + src, 4);
          if (swap) value = byteswap_value(value);
        }
        out[(line * h.samples + s) * h.bands + b] = value;
      }
    }
  }
  return out;
}

void write_header_text(std::ostream& out, std::size_t samples, std::size_t lines, std::size_t bands, int data_type,
                       Interleave il) {
  out << "ENVI\n";
  out << "description = {lithomap}\n";
  out << "samples = " << samples << "\n";
  out << "lines = " << lines << "\n";
  out << "bands = " << bands << "\n";
  out << "header offset = 0\n";
  out << "file type = ENVI Standard\n";
  out << "data type = " << data_type << "\n";
  out << "interleave = " << interleave_name(il) << "\n";
  out << "byte order = 0\n";
}

template <typename T>
void put_le(std::vector<char>& buf, std::size_t offset, T v) {
  if constexpr (!kHostLittle) v = byteswap_value(v);
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

void write_bytes(const std::filesystem::path& path, const std::vector<char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

}  // namespace

HyperspectralCube read_envi(const std::filesystem::path& header_path, const std::filesystem::path& data_path) {
  const EnviHeader h = EnviHeader::load(header_path);
  if (h.data_type != 2 && h.data_type != 4) {
    throw Error(ErrorCode::UnsupportedDataType, "cubes must be 16-bit signed integer (2) or 32-bit float (4), got " +
                                                    std::to_string(h.data_type));
  }
  HyperspectralCube cube;
  cube.rows = h.lines;
  cube.cols = h.samples;
  cube.bands = h.bands;
  cube.data = decode_samples(h, read_all(data_path));
  cube.sample_type = h.data_type == 2 ? SampleType::Int16 : SampleType::Float32;
  cube.units = h.data_type == 2 ? Units::Radiance : Units::Reflectance;
  if (auto u = h.fields.find("units"); u != h.fields.end()) {
    const std::string t = lower(u->second);
    if (t == "radiance") {
      cube.units = Units::Radiance;
    } else if (t == "reflectance") {
      cube.units = Units::Reflectance;
    } else {
      throw Error(ErrorCode::MalformedHeader, "units must be radiance or reflectance");
    }
  }
  if (h.wavelengths.empty()) {
    // no wavelength key: index the bands
    cube.wavelengths.resize(h.bands);
    for (std::size_t b = 0; b < h.bands; ++b) cube.wavelengths[b] = static_cast<double>(b);
  } else {
    cube.wavelengths = h.wavelengths;
  }
  cube.band_mask.assign(h.bands, 1);
  if (auto bbl = h.fields.find("bbl"); bbl != h.fields.end()) {
    const auto items = split(bbl->second, ',');
    if (items.size() != h.bands) throw Error(ErrorCode::MalformedHeader, "bbl length differs from band count");
    for (std::size_t b = 0; b < h.bands; ++b) cube.band_mask[b] = parse_double(items[b], "bbl") != 0.0 ? 1 : 0;
  }
  cube.valid_mask.assign(cube.pixel_count(), 1);
  cube.validate();
  cube.refresh_validity();
  return cube;
}

void write_envi(const HyperspectralCube& cube, const std::filesystem::path& header_path,
                const std::filesystem::path& data_path, Interleave interleave) {
  cube.validate();
  const int data_type = cube.sample_type == SampleType::Int16 ? 2 : 4;
  const std::size_t bps = cube.sample_type == SampleType::Int16 ? 2 : 4;
  std::vector<char> buf(cube.data.size() * bps);
  for (std::size_t line = 0; line < cube.rows; ++line) {
    for (std::size_t s = 0; s < cube.cols; ++s) {
      for (std::size_t b = 0; b < cube.bands; ++b) {
        const std::size_t dst = file_index(interleave, cube.rows, cube.cols, cube.bands, line, s, b) * bps;
        const float v = cube.at(line, s, b);
        if (data_type == 2) {
          put_le(buf, dst, static_cast<std::int16_t>(v));
        } else {
          put_le(buf, dst, v);
        }
      }
    }
  }
  write_bytes(data_path, buf);

  std::ofstream out(header_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + header_path.string());
  write_header_text(out, cube.cols, cube.rows, cube.bands, data_type, interleave);
  out << "units = " << (cube.units == Units::Radiance ? "radiance" : "reflectance") << "\n";
  out << "wavelength units = Micrometers\n";
  out << "wavelength = " << format_list(cube.wavelengths) << "\n";
  std::vector<double> bbl(cube.band_mask.begin(), cube.band_mask.end());
  out << "bbl = " << format_list(bbl) << "\n";
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + header_path.string());
}

void write_raster(const Raster& raster, const std::filesystem::path& header_path,
                  const std::filesystem::path& data_path) {
  if (raster.values.size() != raster.rows * raster.cols) {
    throw Error(ErrorCode::SizeMismatch, "raster holds " + std::to_string(raster.values.size()) + " values");
  }
  const bool bytes = raster.type == RasterType::UInt8;
  const std::size_t bps = bytes ? 1 : 4;
  std::vector<char> buf(raster.values.size() * bps);
  for (std::size_t i = 0; i < raster.values.size(); ++i) {
    if (bytes) {
      buf[i] = static_cast<char>(static_cast<unsigned char>(raster.values[i]));
    } else {
      put_le(buf, i * 4, static_cast<float>(raster.values[i]));
    }
  }
  write_bytes(data_path, buf);
  std::ofstream out(header_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + header_path.string());
  write_header_text(out, raster.cols, raster.rows, 1, bytes ? 1 : 4, Interleave::Bsq);
  for (const auto& [k, v] : raster.extra) out << k << " = " << v << "\n";
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + header_path.string());
}

Raster read_raster(const std::filesystem::path& header_path, const std::filesystem::path& data_path) {
  const EnviHeader h = EnviHeader::load(header_path);
  if (h.bands != 1) throw Error(ErrorCode::MalformedHeader, "expected a single-band raster");
  const auto samples = decode_samples(h, read_all(data_path));
  Raster r;
  r.rows = h.lines;
  r.cols = h.samples;
  r.type = h.data_type == 1 ? RasterType::UInt8 : RasterType::Float32;
  r.values.assign(samples.begin(), samples.end());
  return r;
}

std::filesystem::path data_path_for(const std::filesystem::path& header_path) {
  std::filesystem::path p = header_path;
  p.replace_extension(".img");
  return p;
}

}  // namespace lithomap
