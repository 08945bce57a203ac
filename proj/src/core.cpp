#include "lithomap/core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "lithomap/error.hpp"

namespace lithomap {

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Library: return "library";
    case Provenance::Extracted: return "extracted";
    case Provenance::ClassMean: return "class_mean";
    case Provenance::SubclassMean: return "subclass_mean";
    case Provenance::RaRefined: return "ra_refined";
  }
  return "unknown";
}

void SpectralSignature::validate() const {
  if (wavelengths.size() != values.size()) {
    throw Error(ErrorCode::LengthMismatch, "signature '" + label + "' has " +
                                               std::to_string(wavelengths.size()) + " wavelengths and " +
                                               std::to_string(values.size()) + " values");
  }
  for (Eigen::Index i = 0; i < wavelengths.size(); ++i) {
    if (!std::isfinite(wavelengths[i])) {
      throw Error(ErrorCode::NonMonotonicWavelengths, "non-finite wavelength in '" + label + "'");
    }
    if (i > 0 && !(wavelengths[i] > wavelengths[i - 1])) {
      throw Error(ErrorCode::NonMonotonicWavelengths,
                  "wavelengths of '" + label + "' not strictly ascending at index " + std::to_string(i));
    }
  }
}

Spectrum l2_normalize(const SpectrumRef& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVector, "cannot normalize an all-zero spectrum");
  return v / norm;
}

SpectralSignature l2_normalize(const SpectralSignature& sig) {
  SpectralSignature out = sig;
  out.values = l2_normalize(sig.values);
  return out;
}

double euclidean_distance(const SpectrumRef& a, const SpectrumRef& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " bands");
  }
  return (a - b).norm();
}

double pearson_correlation(const SpectrumRef& x, const SpectrumRef& s) {
  if (x.size() != s.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(s.size()) + " bands");
  }
  if (x.size() < 2) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 2 bands");
  const Eigen::ArrayXd xc = x.array() - x.mean();
  const Eigen::ArrayXd sc = s.array() - s.mean();
  const double sxx = (xc * xc).sum();
  const double sss = (sc * sc).sum();
  if (!(sxx > 0.0) || !(sss > 0.0)) {
    throw Error(ErrorCode::ZeroVariance, "correlation with a constant spectrum is undefined");
  }
  const double r = (xc * sc).sum() / std::sqrt(sxx * sss);
  return std::clamp(r, -1.0, 1.0);
}

double spectral_angle(const SpectrumRef& a, const SpectrumRef& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "spectral angle on unequal lengths");
  const double denom = a.norm() * b.norm();
  if (!(denom > 0.0)) throw Error(ErrorCode::ZeroVector, "spectral angle of a zero spectrum");
  return std::acos(std::clamp(a.dot(b) / denom, -1.0, 1.0));
}

std::vector<std::size_t> out_of_range_bands(const SpectralSignature& sig,
                                            const SpectrumRef& target_wavelengths) {
  std::vector<std::size_t> bad;
  if (sig.size() == 0) {
    for (Eigen::Index i = 0; i < target_wavelengths.size(); ++i) bad.push_back(static_cast<std::size_t>(i));
    return bad;
  }
  const double lo = sig.wavelengths[0];
  const double hi = sig.wavelengths[sig.wavelengths.size() - 1];
  for (Eigen::Index i = 0; i < target_wavelengths.size(); ++i) {
    const double w = target_wavelengths[i];
    if (!(w >= lo && w <= hi)) bad.push_back(static_cast<std::size_t>(i));
  }
  return bad;
}

SpectralSignature resample_to_grid(const SpectralSignature& sig, const SpectrumRef& target_wavelengths) {
  sig.validate();
  if (auto bad = out_of_range_bands(sig, target_wavelengths); !bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < bad.size() && i < 16; ++i) list += (i ? "," : "") + std::to_string(bad[i]);
    if (bad.size() > 16) list += ",...";
    throw Error(ErrorCode::OutOfRangeBand, std::to_string(bad.size()) + " target band(s) outside [" +
                                               std::to_string(sig.wavelengths[0]) + ", " +
                                               std::to_string(sig.wavelengths[sig.wavelengths.size() - 1]) +
                                               "]: " + list);
  }
  SpectralSignature out;
  out.label = sig.label;
  out.provenance = sig.provenance;
  out.wavelengths = target_wavelengths;
  out.values.resize(target_wavelengths.size());
  const double* first = sig.wavelengths.data();
  const double* last = first + sig.wavelengths.size();
  for (Eigen::Index i = 0; i < target_wavelengths.size(); ++i) {
    const double w = target_wavelengths[i];
    const double* hi = std::lower_bound(first, last, w);
    const auto j = static_cast<Eigen::Index>(hi - first);
    if (*hi == w) {
      out.values[i] = sig.values[j];
      continue;
    }
    const double w0 = sig.wavelengths[j - 1];
    const double w1 = sig.wavelengths[j];
    const double t = (w - w0) / (w1 - w0);
    out.values[i] = sig.values[j - 1] + t * (sig.values[j] - sig.values[j - 1]);
  }
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads > 0 ? threads : 1, n));
  if (workers <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &failures, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace lithomap
