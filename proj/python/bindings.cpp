#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mlfd/pipeline.hpp"

namespace py = pybind11;
using namespace mlfd;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const ImageArray& a) {
  if (a.ndim() != 2) throw py::value_error("image must be a 2-D uint8 array (rows, columns)");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  std::vector<std::uint8_t> pixels(a.data(), a.data() + w * h);
  return GrayImage(w, h, std::move(pixels));
}

py::array_t<std::uint8_t> to_array(const GrayImage& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

FeatureMatrix to_matrix(const Eigen::MatrixXd& x, const std::vector<std::string>& labels) {
  FeatureMatrix m;
  m.x = x;
  m.labels = labels;
  m.validate();
  return m;
}

DilationOptions dilation_options(int r_max, unsigned workers, std::uint64_t mem_budget_mib) {
  return {.r_max = r_max, .memory_budget_bytes = mem_budget_mib << 20, .workers = workers};
}

py::dict fd_dict(const FdEstimate& f) {
  py::dict d;
  d["dimension"] = f.dimension;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["rms_residual"] = f.rms_residual;
  d["points"] = f.points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multilevel Bouligand-Minkowski fractal descriptors and LDA evaluation.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", base.ptr());

  // imagery
  m.def("load_grayscale", [](const std::filesystem::path& p) { return to_array(load_grayscale(p)); },
        py::arg("path"), "Read a PGM or PNG file as a (rows, columns) uint8 array.");
  m.def("save_pgm", [](const ImageArray& a, const std::filesystem::path& p) { save_pgm(to_image(a), p); },
        py::arg("image"), py::arg("path"));
  m.def("tile_fixed",
        [](const ImageArray& a, std::size_t tw, std::size_t th) {
          std::vector<py::array_t<std::uint8_t>> out;
          for (const auto& t : tile_fixed(to_image(a), tw, th)) out.push_back(to_array(t));
          return out;
        },
        py::arg("image"), py::arg("tile_w"), py::arg("tile_h"));
  m.def("scan_dataset",
        [](const std::filesystem::path& root) {
          std::vector<std::tuple<std::string, std::string, std::size_t>> out;
          for (const auto& e : scan_dataset(root).entries) out.emplace_back(e.path.string(), e.label, e.index);
          return out;
        },
        py::arg("root"), "List of (path, label, index) sorted by label then filename.");

  // voldilate
  py::class_<DilationCurve>(m, "DilationCurve")
      .def_property_readonly("d_squared", [](const DilationCurve& c) { return c.radii.squared; })
      .def_property_readonly("volumes", [](const DilationCurve& c) { return c.volumes; })
      .def_readonly("surface_voxels", &DilationCurve::surface_voxels)
      .def("__eq__", [](const DilationCurve& a, const DilationCurve& b) { return a == b; })
      .def("__len__", [](const DilationCurve& c) { return c.volumes.size(); });

  m.def("achievable_distances", [](int r_max) { return achievable_distances(r_max).squared; },
        py::arg("r_max"), "Squared radii i^2 + j^2 + k^2 in [1, r_max^2].");
  m.def("dilation_curve",
        [](const ImageArray& a, int r_max, unsigned workers, std::uint64_t mem_budget_mib) {
          const auto img = to_image(a);
          py::gil_scoped_release release;
          return dilation_curve(img, dilation_options(r_max, workers, mem_budget_mib));
        },
        py::arg("image"), py::arg("r_max") = 10, py::arg("workers") = 1,
        py::arg("mem_budget_mib") = 512);
  m.def("dilation_curve_oracle",
        [](const ImageArray& a, int r_max) { return dilation_curve_oracle(to_image(a), r_max); },
        py::arg("image"), py::arg("r_max"));

  // bmdesc
  m.def("bm_descriptors",
        [](const ImageArray& a, int r_max, unsigned workers) {
          const auto img = to_image(a);
          py::gil_scoped_release release;
          return bm_descriptors(img, dilation_options(r_max, workers, 512)).values;
        },
        py::arg("image"), py::arg("r_max") = 10, py::arg("workers") = 1);
  m.def("estimate_fd",
        [](const DilationCurve& c, std::optional<std::int64_t> min_d2, std::optional<std::int64_t> max_d2) {
          return fd_dict(estimate_fd(c, FdWindow{min_d2, max_d2}));
        },
        py::arg("curve"), py::arg("min_d_squared") = py::none(), py::arg("max_d_squared") = py::none());
  m.def("estimate_fd_points",
        [](const std::vector<double>& r, const std::vector<double>& v) { return fd_dict(estimate_fd(r, v)); },
        py::arg("radii"), py::arg("volumes"));

  // multilevel
  m.def("decompose",
        [](const ImageArray& a, int level, std::size_t min_cell_side) {
          std::vector<py::array_t<std::uint8_t>> out;
          for (const auto& c : decompose(to_image(a), level, min_cell_side)) out.push_back(to_array(c));
          return out;
        },
        py::arg("image"), py::arg("level"), py::arg("min_cell_side") = 32);
  m.def("shannon_entropy", [](const std::vector<double>& u) { return shannon_entropy(u); }, py::arg("u"));
  m.def("build_efv",
        [](const ImageArray& a, int r_max, int levels, std::size_t min_cell_side, unsigned workers) {
          const auto img = to_image(a);
          MultilevelOptions opts{levels, min_cell_side, dilation_options(r_max, workers, 512)};
          MultilevelFeatures f;
          {
            py::gil_scoped_release release;
            f = build_efv(img, opts);
          }
          std::vector<std::vector<double>> means;
          for (const auto& d : f.mean_by_level) means.push_back(d.values);
          py::dict out;
          out["efv"] = f.efv;
          out["mean_by_level"] = means;
          out["deviation_by_level"] = f.deviation_by_level;
          return out;
        },
        py::arg("image"), py::arg("r_max") = 10, py::arg("levels") = 3, py::arg("min_cell_side") = 32,
        py::arg("workers") = 1);

  // learner
  py::class_<LdaModel>(m, "LdaModel")
      .def_property_readonly("classes", &LdaModel::classes)
      .def_property_readonly("means", &LdaModel::means)
      .def_property_readonly("covariance", &LdaModel::covariance)
      .def_property_readonly("priors", &LdaModel::priors)
      .def("min_eigenvalue", &LdaModel::min_eigenvalue)
      .def("predict",
           [](const LdaModel& model, const Eigen::VectorXd& x) {
             const auto p = model.predict(x);
             return py::make_tuple(p.label, p.posteriors);
           },
           py::arg("x"), "Returns (label, posteriors aligned with classes).");

  m.def("fit_lda",
        [](const Eigen::MatrixXd& x, const std::vector<std::string>& labels, double ridge) {
          return fit_lda(to_matrix(x, labels), ridge);
        },
        py::arg("x"), py::arg("labels"), py::arg("ridge") = kDefaultRidge);
  m.def("evaluate",
        [](const LdaModel& model, const Eigen::MatrixXd& x, const std::vector<std::string>& labels) {
          const auto r = evaluate(model, to_matrix(x, labels));
          auto j = metrics_to_json(r, model.dimension());
          return py::module_::import("json").attr("loads")(j.dump());
        },
        py::arg("model"), py::arg("x"), py::arg("labels"));
  m.def("confusion_stats",
        [](const ConfusionMatrix& cm) {
          const auto s = confusion_stats(cm);
          py::dict d;
          d["CR"] = s.cr;
          d["kappa"] = s.kappa;
          d["AE1"] = s.ae1;
          d["AE2"] = s.ae2;
          return d;
        },
        py::arg("confusion"));
  m.def("stratified_holdout",
        [](const Eigen::MatrixXd& x, const std::vector<std::string>& labels, double fraction,
           std::uint64_t seed) {
          const auto s = stratified_holdout(to_matrix(x, labels), fraction, seed);
          return py::make_tuple(s.train_rows, s.test_rows);
        },
        py::arg("x"), py::arg("labels"), py::arg("fraction") = 0.5, py::arg("seed") = 0);
  m.def("rank_features",
        [](const Eigen::MatrixXd& x, const std::vector<std::string>& labels, std::uint64_t seed, double ridge) {
          const auto r = rank_features(to_matrix(x, labels), seed, ridge);
          return py::make_tuple(r.order, r.scores);
        },
        py::arg("x"), py::arg("labels"), py::arg("seed") = 0, py::arg("ridge") = kDefaultRidge);
  m.def("select_mld",
        [](const Eigen::MatrixXd& x, const std::vector<std::string>& labels,
           const std::vector<std::size_t>& ranked, std::uint64_t seed, double ridge) {
          const auto s = select_mld(to_matrix(x, labels), ranked, seed, ridge);
          return py::make_tuple(s.selected(), s.prefix_accuracy);  // accuracy per prefix length
        },
        py::arg("x"), py::arg("labels"), py::arg("ranked"), py::arg("seed") = 0,
        py::arg("ridge") = kDefaultRidge);

  // pipeline
  m.def("synth_texture",
        [](int class_id, int sample, std::size_t size, std::uint64_t seed) {
          return to_array(synth_texture(class_id, sample, size, seed));
        },
        py::arg("class_id"), py::arg("sample"), py::arg("size") = 64, py::arg("seed") = 0);
  m.def("generate_synthetic",
        [](const std::filesystem::path& out, int n_classes, int samples, std::size_t size, std::uint64_t seed) {
          return generate_synthetic(out, {n_classes, samples, size, seed});
        },
        py::arg("out"), py::arg("n_classes") = 5, py::arg("samples_per_class") = 10, py::arg("size") = 64,
        py::arg("seed") = 0);
}
