#include "lithomap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "lithomap/core.hpp"
#include "lithomap/error.hpp"
#include "lithomap/keyvalue.hpp"
#include "lithomap/raster_io.hpp"

namespace lithomap {
namespace {

double correlation_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  try {
    return pearson_correlation(xv, yv);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance) return std::numeric_limits<double>::quiet_NaN();
    throw;
  }
}

std::string fmt(const char* spec, double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::size_t SiteReport::used_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.used ? 1 : 0;
  return n;
}

std::vector<Site> read_sites(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_id = table.column("site_id");
  const std::size_t c_row = table.column("row");
  const std::size_t c_col = table.column("col");
  const std::size_t c_gt = table.column("ground_truth_pct");
  std::vector<Site> sites;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path.filename().string() + " row " + std::to_string(i + 2);
    if (row.size() < table.header.size()) throw Error(ErrorCode::InvalidConfig, where + ": missing fields");
    Site s;
    s.site_id = row[c_id];
    s.row = parse_int(row[c_row], where + " row");
    s.col = parse_int(row[c_col], where + " col");
    s.ground_truth = parse_double(row[c_gt], where + " ground_truth_pct");
    sites.push_back(std::move(s));
  }
  return sites;
}

SiteReport build_site_report(const std::vector<Site>& sites, const Raster& ra, const Raster& alpha) {
  if (ra.rows != alpha.rows || ra.cols != alpha.cols) {
    throw Error(ErrorCode::SizeMismatch, "RA and alpha rasters differ in shape");
  }
  const std::vector<double> ra_values = float_map_values(ra);
  const std::vector<double> alpha_values = float_map_values(alpha);
  SiteReport report;
  std::vector<double> truth, ra_used, alpha_used;
  for (const Site& site : sites) {
    SiteRow r;
    r.site_id = site.site_id;
    r.row = site.row;
    r.col = site.col;
    r.ground_truth = site.ground_truth;
    r.ra = r.alpha = std::numeric_limits<double>::quiet_NaN();
    const bool inside = site.row >= 0 && site.col >= 0 && static_cast<std::size_t>(site.row) < ra.rows &&
                        static_cast<std::size_t>(site.col) < ra.cols;
    if (!inside) {
      r.warning = std::string(error_name(ErrorCode::SiteOutsideRaster)) + ": (" + std::to_string(site.row) + ", " +
                  std::to_string(site.col) + ") not in " + std::to_string(ra.rows) + "x" + std::to_string(ra.cols);
    } else {
      const std::size_t idx = static_cast<std::size_t>(site.row) * ra.cols + static_cast<std::size_t>(site.col);
      r.ra = ra_values[idx];
      r.alpha = alpha_values[idx];
      if (std::isnan(r.ra) || std::isnan(r.alpha)) {
        r.warning = std::string(error_name(ErrorCode::SiteOnNonSoilPixel)) + ": no soil estimate at (" +
                    std::to_string(site.row) + ", " + std::to_string(site.col) + ")";
      } else {
        r.used = true;
        truth.push_back(site.ground_truth);
        ra_used.push_back(r.ra);
        alpha_used.push_back(r.alpha);
      }
    }
    report.rows.push_back(std::move(r));
  }
  report.ra_correlation = correlation_or_nan(truth, ra_used);
  report.alpha_correlation = correlation_or_nan(truth, alpha_used);
  return report;
}

void write_site_report_csv(const std::filesystem::path& path, const SiteReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << "site_id,row,col,ground_truth_pct,relative_availability,alpha,status\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.site_id) << ',' << r.row << ',' << r.col << ',' << fmt("%.10g", r.ground_truth) << ','
        << fmt("%.10g", r.ra) << ',' << fmt("%.10g", r.alpha) << ',' << csv_field(r.used ? "ok" : r.warning)
        << '\n';
  }
  out << "# pearson_ra," << fmt("%.10g", report.ra_correlation) << '\n';
  out << "# pearson_alpha," << fmt("%.10g", report.alpha_correlation) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

void print_site_report(std::ostream& out, const SiteReport& report) {
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %5s %5s %12s %10s %10s\n", "site", "row", "col", "truth_pct", "RA",
                "alpha");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-12s %5lld %5lld %12s %10s %10s", r.site_id.c_str(), r.row, r.col,
                  fmt("%.4f", r.ground_truth).c_str(), fmt("%.4f", r.ra).c_str(), fmt("%.4f", r.alpha).c_str());
    out << line;
    if (!r.used) out << "  skipped: " << r.warning;
    out << '\n';
  }
  out << "sites used: " << report.used_count() << " of " << report.rows.size() << '\n';
  out << "pearson(truth, RA)    = " << fmt("%.5f", report.ra_correlation) << '\n';
  out << "pearson(truth, alpha) = " << fmt("%.5f", report.alpha_correlation) << '\n';
}

}  // namespace lithomap
