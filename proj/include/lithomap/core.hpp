#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace lithomap {

/// One spectrum, indexed by band.
using Spectrum = Eigen::VectorXd;

/// A set of pixel spectra stored as columns (bands x pixels).
using PixelMatrix = Eigen::MatrixXd;

using SpectrumRef = Eigen::Ref<const Eigen::VectorXd>;

enum class Provenance { Library, Extracted, ClassMean, SubclassMean, RaRefined };

std::string provenance_name(Provenance p);

/// A spectrum on an explicit wavelength grid (micrometers).
struct SpectralSignature {
  Spectrum wavelengths;
  Spectrum values;
  std::string label;
  Provenance provenance = Provenance::Extracted;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }

  /// Throws LengthMismatch / NonMonotonicWavelengths when the invariants fail.
  void validate() const;
};

/// Unit Euclidean norm. Throws ZeroVector for an all-zero input.
Spectrum l2_normalize(const SpectrumRef& v);
SpectralSignature l2_normalize(const SpectralSignature& sig);

double euclidean_distance(const SpectrumRef& a, const SpectrumRef& b);

/// Pearson correlation coefficient. Throws ZeroVariance if either input is
/// constant and LengthMismatch on unequal or too-short inputs.
double pearson_correlation(const SpectrumRef& x, const SpectrumRef& s);

/// Angle (radians) between two spectra; scale invariant.
double spectral_angle(const SpectrumRef& a, const SpectrumRef& b);

/// Piecewise-linear resampling onto `target_wavelengths`. Every target must
/// lie inside the source support; OutOfRangeBand lists the ones that do not.
SpectralSignature resample_to_grid(const SpectralSignature& sig, const SpectrumRef& target_wavelengths);

/// Indices of targets outside the source support (empty when all are usable).
std::vector<std::size_t> out_of_range_bands(const SpectralSignature& sig,
                                            const SpectrumRef& target_wavelengths);

/// Run fn(begin, end) over [0, n) split into contiguous chunks on `threads`
/// workers. Callers must only write per-index outputs, which keeps results
/// independent of the worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace lithomap
