#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lithomap/envi.hpp"

namespace lithomap {

struct SiteRow {
  std::string site_id;
  long long row = 0;
  long long col = 0;
  double ground_truth = 0.0;  ///< percent, XRD or magnetic separation
  double ra = 0.0;
  double alpha = 0.0;
  bool used = false;
  std::string warning;  ///< error name and detail when the row was skipped
};

struct SiteReport {
  std::vector<SiteRow> rows;  ///< one per CSV row, in file order
  double ra_correlation = 0.0;     ///< headline figure; NaN if undefined
  double alpha_correlation = 0.0;  ///< NaN if undefined

  std::size_t used_count() const;
};

struct Site {
  std::string site_id;
  long long row = 0;
  long long col = 0;
  double ground_truth = 0.0;
};

/// Sites CSV with header site_id,row,col,ground_truth_pct.
std::vector<Site> read_sites(const std::filesystem::path& path);

/// Sample both maps at every site and correlate against ground truth.
/// Sites outside the raster or on the -1 sentinel are kept in the report
/// with a warning and left out of the correlations.
SiteReport build_site_report(const std::vector<Site>& sites, const Raster& ra, const Raster& alpha);

void write_site_report_csv(const std::filesystem::path& path, const SiteReport& report);

/// Human-readable table plus both correlations.
void print_site_report(std::ostream& out, const SiteReport& report);

}  // namespace lithomap
