#include <cmath>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "lithomap/commands.hpp"
#include "lithomap/raster_io.hpp"
#include "lithomap/report.hpp"

using namespace lithomap;

namespace {

const std::filesystem::path kTables = std::filesystem::path(LITHOMAP_SOURCE_DIR) / "fixtures" / "published_tables";

SiteReport run_fixture(const std::string& site) {
  const auto dir = kTables / site;
  return build_site_report(read_sites(dir / "sites.csv"), read_raster(dir / "ra_map.hdr", dir / "ra_map.img"),
                           read_raster(dir / "alpha_map.hdr", dir / "alpha_map.img"));
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("published site correlations") {
    const auto jaffna = run_fixture("jaffna");
    CHECK(jaffna.rows.size() == 4);
    CHECK(jaffna.used_count() == 4);
    CHECK(jaffna.ra_correlation == doctest::Approx(0.9853).epsilon(0.0005));
    CHECK(std::abs(run_fixture("pulmoddai").ra_correlation - 0.8115) <= 0.0005);
    CHECK(std::abs(run_fixture("mannar").ra_correlation - 0.5640) <= 0.0005);
    CHECK(std::abs(run_fixture("giants_tank").ra_correlation - 0.6504) <= 0.0005);
    CHECK(std::abs(jaffna.alpha_correlation) <= 1.0);
  }

  TEST_CASE("skipped sites") {
    const auto dir = testing::scratch_dir("report_skip");
    write_raster_pair(float_map_raster(2, 2, {0.1, NAN, 0.5, 0.9}), dir, "ra");
    write_raster_pair(float_map_raster(2, 2, {0.2, NAN, 0.4, 0.8}), dir, "alpha");
    {
      std::ofstream(dir / "sites.csv") << "site_id,row,col,ground_truth_pct\n"
                                          "a,0,0,1\nb,0,1,2\nc,1,0,5\nd,1,1,9\ne,5,5,3\n";
    }
    const auto r = build_site_report(read_sites(dir / "sites.csv"), read_raster(dir / "ra.hdr", dir / "ra.img"),
                                     read_raster(dir / "alpha.hdr", dir / "alpha.img"));
    CHECK(r.rows.size() == 5);
    CHECK(r.used_count() == 3);
    CHECK(r.rows[1].warning.rfind("SiteOnNonSoilPixel", 0) == 0);
    CHECK(r.rows[4].warning.rfind("SiteOutsideRaster", 0) == 0);
    CHECK(r.ra_correlation ==
          doctest::Approx(pearson_correlation(Eigen::Vector3d(1, 5, 9), Eigen::Vector3d(0.1, 0.5, 0.9))));

    std::ostringstream out, err;
    ReportOptions o{dir / "sites.csv", dir / "ra.hdr", dir / "alpha.hdr", dir / "out"};
    CHECK(cmd_report(o, out, err) == 0);
    CHECK(err.str().find("site b skipped") != std::string::npos);
    CHECK(out.str().find("pearson(truth, RA)") != std::string::npos);
    std::ifstream csv(dir / "out" / "site_report.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "site_id,row,col,ground_truth_pct,relative_availability,alpha,status");

    o.sites = dir / "missing.csv";
    CHECK(cmd_report(o, out, err) == 2);
  }

  TEST_CASE("float rasters use the -1 sentinel") {
    const Raster r = float_map_raster(1, 3, {0.5, NAN, 1.0});
    CHECK(r.values[1] == -1.0);
    CHECK(r.extra.at("data ignore value") == "-1");
    const auto back = float_map_values(r);
    CHECK(std::isnan(back[1]));
    CHECK(back[2] == 1.0);
  }
}
