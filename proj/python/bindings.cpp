#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <numeric>
#include <optional>

#include "limase/dataset.hpp"
#include "limase/error.hpp"
#include "limase/forest.hpp"
#include "limase/json_io.hpp"
#include "limase/kernel_shap.hpp"
#include "limase/limase.hpp"
#include "limase/mlp.hpp"
#include "limase/shapley.hpp"
#include "limase/sp.hpp"
#include "limase/synth.hpp"
#include "limase/tree.hpp"
#include "limase/viz.hpp"

namespace py = pybind11;
using namespace limase;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy_n(a.data(), a.size(), m.data().begin());
  return m;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Task make_task(const std::string& kind, int n_classes) {
  const auto k = parse_task_kind(kind);
  return k == TaskKind::kClassification ? Task::classification(n_classes) : Task::regression();
}

py::dict explanation_dict(const ShapExplanation& e) {
  py::dict d;
  d["explainer"] = e.explainer;
  d["base_value"] = e.base_value;
  d["fx"] = e.fx;
  d["phi"] = to_array(e.phi);
  d["instance"] = to_array(e.instance);
  d["class_index"] = e.class_index ? py::cast(*e.class_index) : py::none();
  d["elapsed_ms"] = e.elapsed_ms;
  return d;
}

ShapExplanation explanation_from(const py::dict& d) {
  ShapExplanation e;
  e.explainer = d.contains("explainer") ? d["explainer"].cast<std::string>() : "limase";
  e.base_value = d["base_value"].cast<double>();
  e.fx = d["fx"].cast<double>();
  e.phi = to_vector(d["phi"].cast<Array>());
  e.instance = to_vector(d["instance"].cast<Array>());
  return e;
}

// Wraps a Python callable X -> predictions. Calls happen on the caller's
// thread with the GIL held.
class CallableModel : public BlackBoxModel {
 public:
  CallableModel(py::function fn, std::size_t d, Task task)
      : fn_(std::move(fn)), d_(d), task_(task) {}

  ModelOutput predict(const Matrix& rows) const override {
    py::gil_scoped_acquire gil;
    Array out = fn_(to_array(rows)).cast<Array>();
    if (out.ndim() == 1) {
      out = out.reshape({out.shape(0), py::ssize_t{1}});
    }
    auto m = to_matrix(out);
    validate_output(m, rows.rows(), task_);
    return m;
  }
  Task task() const override { return task_; }
  std::size_t num_features() const override { return d_; }

 private:
  py::function fn_;
  std::size_t d_;
  Task task_;
};

LimaseConfig limase_config(std::size_t n_samples, std::optional<double> sigma, std::uint64_t seed,
                           std::optional<int> class_index, int max_depth, int min_samples_leaf) {
  LimaseConfig c;
  c.n_samples = n_samples;
  if (sigma) {
    c.sigma_mode = SigmaMode::kAbsolute;
    c.sigma = *sigma;
  }
  c.seed = seed;
  c.class_index = class_index;
  c.tree_params = TreeParams{max_depth, min_samples_leaf, 0.0};
  c.validate();
  return c;
}

py::dict limase_dict(const LimaseResult& r) {
  auto d = explanation_dict(r.explanation);
  d["fidelity_r2"] = r.fidelity_r2;
  d["degenerate"] = r.degenerate;
  d["sigma"] = r.sigma;
  d["surrogate_depth"] = r.surrogate.depth();
  d["surrogate_leaves"] = r.surrogate.num_leaves();
  return d;
}

ExplanationMatrix explanation_matrix_from(const Array& s) {
  ExplanationMatrix m;
  m.values = to_matrix(s);
  m.instance_ids.resize(m.values.rows());
  std::iota(m.instance_ids.begin(), m.instance_ids.end(), 0);
  return m;
}

SignMode sign_mode(const std::string& s) {
  if (s == "absolute") return SignMode::kAbsolute;
  if (s == "literal") return SignMode::kLiteral;
  throw InvalidArgument("sign_mode must be 'absolute' or 'literal'");
}

}  // namespace

PYBIND11_MODULE(_limase, m) {
  m.doc() = "Local surrogate Shapley explanations";

  auto base_error = py::register_exception<Error>(m, "LimaseError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", base_error.ptr());
  py::register_exception<ModelError>(m, "ModelError", base_error.ptr());

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const Array& x, const Array& y, std::optional<std::vector<std::string>> names,
                       const std::string& task, int n_classes) {
             auto rows = to_matrix(x);
             if (!names) {
               names.emplace();
               for (std::size_t j = 0; j < rows.cols(); ++j) names->push_back("x" + std::to_string(j));
             }
             return Dataset(*names, std::move(rows), to_vector(y), make_task(task, n_classes));
           }),
           py::arg("x"), py::arg("y"), py::arg("feature_names") = py::none(),
           py::arg("task") = "regression", py::arg("n_classes") = 0)
      .def_static("load_csv",
                  [](const std::filesystem::path& path, const std::string& target,
                     const std::string& task) {
                    return load_csv(path, target, parse_task_kind(task));
                  },
                  py::arg("path"), py::arg("target"), py::arg("task") = "regression")
      .def_property_readonly("num_rows", &Dataset::num_rows)
      .def_property_readonly("num_features", &Dataset::num_features)
      .def_property_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("x", [](const Dataset& d) { return to_array(d.rows()); })
      .def_property_readonly("y", [](const Dataset& d) { return to_array(d.target()); })
      .def("row", [](const Dataset& d, std::size_t i) {
        if (i >= d.num_rows()) throw py::index_error("row out of range");
        return to_array(d.row(i));
      });

  m.def("make_synthetic",
        [](std::size_t rows, std::size_t features, std::size_t informative, double noise,
           int classes, std::uint64_t seed) {
          return make_synthetic({rows, features, informative, noise, classes, seed});
        },
        py::arg("rows") = 500, py::arg("features") = 8, py::arg("informative") = 5,
        py::arg("noise") = 0.1, py::arg("classes") = 0, py::arg("seed") = 0);

  py::class_<BlackBoxModel, std::shared_ptr<BlackBoxModel>>(m, "Model")
      .def("predict", [](const BlackBoxModel& model, const Array& x) {
        return to_array(model.predict(to_matrix(x)));
      })
      .def_property_readonly("num_features", &BlackBoxModel::num_features)
      .def_property_readonly("task", [](const BlackBoxModel& model) {
        return to_string(model.task().kind);
      });

  py::class_<DecisionTree, BlackBoxModel, std::shared_ptr<DecisionTree>>(m, "DecisionTree")
      .def_property_readonly("depth", &DecisionTree::depth)
      .def_property_readonly("num_leaves", &DecisionTree::num_leaves)
      .def("to_json", [](const DecisionTree& t) { return to_json(t).dump(); });
  py::class_<ForestModel, BlackBoxModel, std::shared_ptr<ForestModel>>(m, "RandomForest")
      .def_property_readonly("num_trees", &ForestModel::num_trees)
      .def("to_json", [](const ForestModel& f) { return to_json(f).dump(); });
  py::class_<MlpModel, BlackBoxModel, std::shared_ptr<MlpModel>>(m, "Mlp")
      .def("to_json", [](const MlpModel& f) { return to_json(f).dump(); });
  py::class_<CallableModel, BlackBoxModel, std::shared_ptr<CallableModel>>(m, "CallableModel")
      .def(py::init([](py::function fn, std::size_t num_features, const std::string& task,
                       int n_classes) {
             return std::make_shared<CallableModel>(std::move(fn), num_features,
                                                    make_task(task, n_classes));
           }),
           py::arg("fn"), py::arg("num_features"), py::arg("task") = "regression",
           py::arg("n_classes") = 0);

  m.def("fit_tree",
        [](const Array& x, const Array& y, std::optional<Array> w, int max_depth,
           int min_samples_leaf) {
          const auto rows = to_matrix(x);
          const auto target = to_vector(y);
          const auto weights = w ? to_vector(*w) : std::vector<double>(rows.rows(), 1.0);
          return std::make_shared<DecisionTree>(
              fit_tree(rows, target, weights, TreeParams{max_depth, min_samples_leaf, 0.0}));
        },
        py::arg("x"), py::arg("y"), py::arg("sample_weight") = py::none(),
        py::arg("max_depth") = 6, py::arg("min_samples_leaf") = 1);

  m.def("train_forest",
        [](const Dataset& data, int n_trees, int max_depth, std::uint64_t seed,
           std::size_t threads) {
          ForestParams p;
          p.n_trees = n_trees;
          p.tree = TreeParams{max_depth, 1, 0.0};
          p.threads = threads;
          RandomStream rng(seed);
          py::gil_scoped_release release;
          return std::make_shared<ForestModel>(fit_random_forest(data, p, rng));
        },
        py::arg("data"), py::arg("n_trees") = 50, py::arg("max_depth") = 8, py::arg("seed") = 0,
        py::arg("threads") = 0);

  m.def("train_mlp",
        [](const Dataset& data, std::vector<std::size_t> hidden, int epochs, double lr,
           std::uint64_t seed) {
          MlpParams p;
          p.hidden = std::move(hidden);
          p.epochs = epochs;
          p.learning_rate = lr;
          RandomStream rng(seed);
          py::gil_scoped_release release;
          return std::make_shared<MlpModel>(fit_mlp(data, p, rng));
        },
        py::arg("data"), py::arg("hidden") = std::vector<std::size_t>{32},
        py::arg("epochs") = 200, py::arg("lr") = 0.05, py::arg("seed") = 0);

  m.def("load_model", [](const std::filesystem::path& path) -> std::shared_ptr<BlackBoxModel> {
    return model_from_json(read_json(path));
  });

  m.def("explain",
        [](const BlackBoxModel& model, const Dataset& data, const Array& x,
           std::size_t n_samples, std::optional<double> sigma, std::uint64_t seed,
           std::optional<int> class_index, int max_depth, int min_samples_leaf) {
          const auto c =
              limase_config(n_samples, sigma, seed, class_index, max_depth, min_samples_leaf);
          return limase_dict(limase_explain(model, to_vector(x), data.features(), c));
        },
        py::arg("model"), py::arg("data"), py::arg("x"), py::arg("n_samples") = 1000,
        py::arg("sigma") = py::none(), py::arg("seed") = 0, py::arg("class_index") = py::none(),
        py::arg("max_depth") = 6, py::arg("min_samples_leaf") = 5);

  m.def("tree_shap", [](const DecisionTree& tree, const Array& x) {
    return explanation_dict(tree_shap(tree, to_vector(x)));
  });
  m.def("forest_shap",
        [](const ForestModel& forest, const Array& x, std::optional<int> class_index) {
          return explanation_dict(forest_shap(forest, to_vector(x), class_index));
        },
        py::arg("forest"), py::arg("x"), py::arg("class_index") = py::none());
  m.def("kernel_shap",
        [](const BlackBoxModel& model, const Array& x, const Array& background,
           std::optional<std::size_t> budget, std::uint64_t seed, std::optional<int> class_index) {
          KernelShapOptions o;
          o.budget = budget;
          o.class_index = class_index;
          RandomStream rng(seed);
          return explanation_dict(kernel_shap(model, to_vector(x), to_matrix(background), o, rng));
        },
        py::arg("model"), py::arg("x"), py::arg("background"), py::arg("budget") = py::none(),
        py::arg("seed") = 0, py::arg("class_index") = py::none());

  m.def("feature_importance",
        [](const Array& s, const std::string& mode) {
          return to_array(feature_importance(explanation_matrix_from(s), sign_mode(mode)));
        },
        py::arg("s"), py::arg("sign_mode") = "absolute");
  m.def("submodular_pick",
        [](const Array& s, std::size_t budget, const std::string& mode) {
          const auto r = submodular_pick(explanation_matrix_from(s), budget, sign_mode(mode));
          py::dict d;
          d["selected"] = r.selected;
          d["importance"] = to_array(r.importance);
          d["coverage_history"] = r.coverage_history;
          d["budget"] = r.budget;
          return d;
        },
        py::arg("s"), py::arg("budget"), py::arg("sign_mode") = "absolute");

  m.def("force_plot_svg",
        [](const py::dict& explanation, const Dataset& data) {
          return render_svg(build_force_plot(explanation_from(explanation), data.features()));
        },
        py::arg("explanation"), py::arg("data"));
  m.def("summary_plot_svg",
        [](const Array& s, const Array& x, const Dataset& data, std::size_t max_features) {
          return render_svg(
              build_summary_plot(explanation_matrix_from(s), to_matrix(x), data.features()),
              SvgOptions{max_features});
        },
        py::arg("s"), py::arg("x"), py::arg("data"), py::arg("max_features") = 15);
}
