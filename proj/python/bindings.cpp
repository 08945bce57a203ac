#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <limits>

#include "lithomap/envi.hpp"
#include "lithomap/error.hpp"
#include "lithomap/ingest.hpp"
#include "lithomap/pipeline.hpp"
#include "lithomap/preclassify.hpp"
#include "lithomap/project.hpp"
#include "lithomap/synth.hpp"
#include "lithomap/unmix.hpp"

namespace py = pybind11;
using namespace lithomap;

namespace {

using RowPixels = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// Python pixel matrices are (n, bands); the library works on bands x n.
PixelMatrix columns(const Eigen::Ref<const RowPixels>& rows) { return rows.transpose(); }
RowPixels rows_of(const PixelMatrix& cols) { return cols.transpose(); }

FloatArray cube_array(const HyperspectralCube& cube) {
  FloatArray out({cube.rows, cube.cols, cube.bands});
  std::memcpy(out.mutable_data(), cube.data.data(), cube.data.size() * sizeof(float));
  return out;
}

HyperspectralCube cube_from_array(const FloatArray& data, const std::vector<double>& wavelengths) {
  if (data.ndim() != 3) throw Error(ErrorCode::SizeMismatch, "cube must be a (rows, cols, bands) array");
  HyperspectralCube cube(static_cast<std::size_t>(data.shape(0)), static_cast<std::size_t>(data.shape(1)),
                         static_cast<std::size_t>(data.shape(2)));
  if (wavelengths.size() != cube.bands) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(wavelengths.size()) + " wavelengths for " +
                                               std::to_string(cube.bands) + " bands");
  }
  cube.wavelengths = wavelengths;
  std::memcpy(cube.data.data(), data.data(), cube.data.size() * sizeof(float));
  cube.refresh_validity();
  cube.validate();
  return cube;
}

py::array_t<double> grid(const std::vector<double>& values, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::memcpy(out.mutable_data(), values.data(), values.size() * sizeof(double));
  return out;
}

py::array_t<int> label_grid(const std::vector<int>& labels, std::size_t rows, std::size_t cols) {
  py::array_t<int> out({rows, cols});
  std::memcpy(out.mutable_data(), labels.data(), labels.size() * sizeof(int));
  return out;
}

}  // namespace

PYBIND11_MODULE(_lithomap, m) {
  m.doc() = "lithomap: hyperspectral mineral abundance mapping";

  static py::exception<Error> error_type(m, "LithomapError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code name, message)
      py::object args = py::make_tuple(std::string(error_name(e.code())), e.message());
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  m.def("toa_reflectance", &toa_reflectance, py::arg("radiance"), py::arg("esun"), py::arg("earth_sun_distance"),
        py::arg("solar_zenith_deg"), "Top-of-atmosphere reflectance of one radiance value.");

  m.def("pearson_correlation", [](const Spectrum& x, const Spectrum& y) { return pearson_correlation(x, y); },
        py::arg("x"), py::arg("y"));
  m.def("spectral_angle", [](const Spectrum& a, const Spectrum& b) { return spectral_angle(a, b); }, py::arg("a"),
        py::arg("b"), "Angle in radians between two spectra.");

  m.def(
      "solve_alpha",
      [](const Spectrum& s, const Spectrum& mineral, const Spectrum& impurity) {
        MixtureModel model{mineral, impurity};
        const auto est = solve_alpha(s, model);
        return py::make_tuple(est.alpha, est.residual);
      },
      py::arg("s"), py::arg("mineral"), py::arg("impurity"),
      "Sum-to-one, nonnegative two-endmember abundance. Returns (alpha, residual).");
  m.def("grid_search_alpha",
        [](const Spectrum& s, const Spectrum& mineral, const Spectrum& impurity, double step) {
          return grid_search_alpha(s, mineral, impurity, step);
        },
        py::arg("s"), py::arg("mineral"), py::arg("impurity"), py::arg("step") = 1e-4,
        "Brute-force reference for solve_alpha.");

  m.def("relative_availability", &relative_availability, py::arg("d_m"), py::arg("d_i"));

  m.def(
      "fisher_direction",
      [](const Eigen::Ref<const RowPixels>& mineral, const Eigen::Ref<const RowPixels>& impurity, double ridge) {
        const auto fd = fisher_direction(columns(mineral), columns(impurity), ridge);
        py::dict d;
        d["w"] = fd.w;
        d["mu_mineral"] = fd.mu_mineral_proj;
        d["mu_impurity"] = fd.mu_impurity_proj;
        d["fisher_ratio"] = fd.fisher_ratio;
        return d;
      },
      py::arg("mineral"), py::arg("impurity"), py::arg("ridge") = 1e-6,
      "Two-class Fisher discriminant on (n, bands) samples.");

  m.def(
      "similarity_row",
      [](const Spectrum& pixel, const Eigen::Ref<const RowPixels>& candidates) {
        return similarity_row(l2_normalize(pixel), [&] {
          PixelMatrix c = columns(candidates);
          for (Eigen::Index j = 0; j < c.cols(); ++j) c.col(j) = l2_normalize(c.col(j));
          return c;
        }());
      },
      py::arg("pixel"), py::arg("candidates"), "Normalized reciprocal-distance affinities (sum to one).");

  m.def(
      "kmeans",
      [](const Eigen::Ref<const RowPixels>& pixels, int k, std::uint64_t seed, int restarts, int threads) {
        const auto r = kmeans(columns(pixels), k, seed, restarts, threads);
        return py::make_tuple(r.assignments, rows_of(r.centroids), r.wcss);
      },
      py::arg("pixels"), py::arg("k"), py::arg("seed") = 1, py::arg("restarts") = 8, py::arg("threads") = 1,
      "Returns (assignments, centroids, wcss).");
  m.def(
      "wcss_curve",
      [](const Eigen::Ref<const RowPixels>& pixels, int k_max, std::uint64_t seed, int restarts, int threads) {
        const auto c = wcss_curve(columns(pixels), k_max, seed, restarts, threads);
        return py::make_tuple(c.wcss, c.chosen_k);
      },
      py::arg("pixels"), py::arg("k_max") = 10, py::arg("seed") = 1, py::arg("restarts") = 8,
      py::arg("threads") = 1, "Returns (wcss for k = 1..k_max, elbow k).");
  m.def("elbow_select", [](const std::vector<double>& wcss) { return elbow_select(wcss).k; }, py::arg("wcss"));

  m.def(
      "vca",
      [](const Eigen::Ref<const RowPixels>& pixels, int p, std::uint64_t seed) {
        const auto r = vca(columns(pixels), p, seed);
        return py::make_tuple(rows_of(r.endmembers), r.indices);
      },
      py::arg("pixels"), py::arg("p"), py::arg("seed") = 1, "Returns (endmembers (p, bands), pixel indices).");

  m.def(
      "read_envi",
      [](const std::filesystem::path& header) {
        const auto cube = read_envi(header, data_path_for(header));
        return py::make_tuple(cube_array(cube), cube.wavelengths);
      },
      py::arg("header"), "Returns (cube (rows, cols, bands) float32, wavelengths).");
  m.def(
      "write_envi",
      [](const std::filesystem::path& header, const FloatArray& data, const std::vector<double>& wavelengths,
         const std::string& interleave) {
        write_envi(cube_from_array(data, wavelengths), header, data_path_for(header), parse_interleave(interleave));
      },
      py::arg("header"), py::arg("cube"), py::arg("wavelengths"), py::arg("interleave") = "bsq");
  m.def(
      "read_raster",
      [](const std::filesystem::path& header) {
        const auto r = read_raster(header, data_path_for(header));
        return grid(r.values, r.rows, r.cols);
      },
      py::arg("header"), "Single-band raster as a (rows, cols) float64 array.");

  m.def(
      "generate_scene",
      [](std::size_t rows, std::size_t cols, std::size_t bands, double snr_db, double texture, std::uint64_t seed) {
        SceneSpec spec;
        spec.rows = rows;
        spec.cols = cols;
        spec.bands = bands;
        spec.snr_db = snr_db;
        spec.texture = texture;
        spec.seed = seed;
        const Scene scene = generate_scene(spec);
        py::dict d;
        d["cube"] = cube_array(scene.cube);
        d["wavelengths"] = scene.cube.wavelengths;
        d["truth"] = label_grid(scene.truth.labels, rows, cols);
        d["alpha"] = grid(scene.alpha, rows, cols);
        d["mineral"] = scene.generators.mineral;
        d["impurity"] = scene.generators.impurity;
        d["lab"] = scene.generators.lab;
        return d;
      },
      py::arg("rows") = 64, py::arg("cols") = 64, py::arg("bands") = 100,
      py::arg("snr_db") = std::numeric_limits<double>::infinity(), py::arg("texture") = 0.08, py::arg("seed") = 1,
      "Synthetic water / vegetation / soil scene with a known abundance field.");

  m.def(
      "run_map",
      [](const FloatArray& cube, const std::vector<double>& wavelengths, const std::vector<double>& lab_wavelengths,
         const std::vector<double>& lab_values, const std::string& soil_class,
         const std::vector<std::string>& class_names, std::uint64_t seed, std::optional<int> k_override,
         int threads) {
        PipelineConfig config;
        config.seed = seed;
        config.soil_class = soil_class;
        config.class_names = class_names;
        config.k_override = k_override;
        config.threads = threads;
        SpectralSignature lab;
        lab.label = "lab";
        lab.wavelengths = Eigen::Map<const Spectrum>(lab_wavelengths.data(), static_cast<Eigen::Index>(lab_wavelengths.size()));
        lab.values = Eigen::Map<const Spectrum>(lab_values.data(), static_cast<Eigen::Index>(lab_values.size()));
        const auto input = cube_from_array(cube, wavelengths);
        MapResult r;
        {
          py::gil_scoped_release release;
          r = run_map(config, input, lab);
        }
        py::dict d;
        d["k"] = r.k;
        d["class_map"] = label_grid(r.classes.labels, input.rows, input.cols);
        d["class_names"] = r.classes.class_names;
        d["soil_class"] = r.soil_class;
        d["ra"] = grid(r.ra_map, input.rows, input.cols);
        d["alpha"] = grid(r.abundance.alpha, input.rows, input.cols);
        d["mineral"] = r.refined.mineral;
        d["impurity"] = r.refined.impurity;
        d["fisher_ratio"] = r.direction.fisher_ratio;
        return d;
      },
      py::arg("cube"), py::arg("wavelengths"), py::arg("lab_wavelengths"), py::arg("lab_values"),
      py::arg("soil_class"), py::arg("class_names") = std::vector<std::string>{}, py::arg("seed") = 1,
      py::arg("k_override") = std::nullopt, py::arg("threads") = 1,
      "Full pipeline on a reflectance cube: class map, relative availability and abundance.");
}
