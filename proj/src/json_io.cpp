#include "limase/json_io.hpp"

#include <fstream>

#include "limase/error.hpp"

namespace limase {

Json to_json(const ShapExplanation& e, const std::vector<std::string>& feature_names,
             bool with_timing) {
  Json j;
  j["explainer"] = e.explainer;
  j["base_value"] = e.base_value;
  j["fx"] = e.fx;
  j["phi"] = e.phi;
  j["feature_names"] = feature_names;
  j["instance"] = e.instance;
  if (e.class_index) j["class_index"] = *e.class_index;
  if (with_timing) j["elapsed_ms"] = e.elapsed_ms;
  return j;
}

Json to_json(const LimaseResult& r, const std::vector<std::string>& feature_names,
             bool with_timing) {
  Json j = to_json(r.explanation, feature_names, with_timing);
  j["fidelity_r2"] = r.fidelity_r2;
  j["sigma"] = r.sigma;
  j["n_samples"] = r.config.n_samples;
  j["degenerate"] = r.degenerate;
  j["surrogate_depth"] = r.surrogate.depth();
  j["surrogate_leaves"] = r.surrogate.num_leaves();
  return j;
}

Json to_json(const SpResult& r) {
  Json j;
  j["selected"] = r.selected;
  j["importance"] = r.importance;
  j["coverage_history"] = r.coverage_history;
  j["budget"] = r.budget;
  return j;
}

Json to_json(const ExplanationMatrix& m, const std::vector<std::string>& feature_names) {
  Json j;
  j["feature_names"] = feature_names;
  j["instance_ids"] = m.instance_ids;
  j["phi"] = m.values.to_rows();
  return j;
}

Json to_json(const ForcePlotData& p) {
  Json j;
  j["base_value"] = p.base_value;
  j["fx"] = p.fx;
  Json contributions = Json::array();
  for (const auto& c : p.contributions) {
    contributions.push_back(
        {{"feature", c.feature}, {"name", c.name}, {"value", c.value}, {"phi", c.phi}});
  }
  j["contributions"] = std::move(contributions);
  j["positive"] = p.positive;
  j["negative"] = p.negative;
  return j;
}

Json to_json(const SummaryPlotData& p) {
  Json j;
  j["sample_count"] = p.sample_count;
  Json series = Json::array();
  for (const auto& s : p.series) {
    series.push_back({{"feature", s.feature},
                      {"name", s.name},
                      {"mean_abs_phi", s.mean_abs_phi},
                      {"phi", s.phi},
                      {"color", s.color}});
  }
  j["series"] = std::move(series);
  return j;
}

Json dataset_summary(const Dataset& data) {
  Json j;
  j["rows"] = data.num_rows();
  j["features"] = data.num_features();
  j["target"] = data.target_name();
  j["task"] = to_string(data.task().kind);
  if (data.task().is_classification()) j["n_classes"] = data.task().n_classes;
  Json stats = Json::array();
  for (const auto& f : data.features()) {
    stats.push_back({{"name", f.name},
                     {"index", f.index},
                     {"mean", f.mean},
                     {"std", f.std},
                     {"min", f.min},
                     {"max", f.max}});
  }
  j["feature_stats"] = std::move(stats);
  return j;
}

ShapExplanation explanation_from_json(const Json& j) {
  try {
    ShapExplanation e;
    e.explainer = j.at("explainer").get<std::string>();
    e.base_value = j.at("base_value").get<double>();
    e.fx = j.at("fx").get<double>();
    e.phi = j.at("phi").get<std::vector<double>>();
    e.instance = j.at("instance").get<std::vector<double>>();
    if (j.contains("class_index")) e.class_index = j["class_index"].get<int>();
    if (j.contains("elapsed_ms")) e.elapsed_ms = j["elapsed_ms"].get<double>();
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw DataError(std::string("malformed explanation record: ") + err.what());
  }
}

namespace {

Json params_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth},
          {"min_samples_leaf", p.min_samples_leaf},
          {"min_weight_fraction_leaf", p.min_weight_fraction_leaf}};
}

Json tree_body(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back({{"cover", n.cover}, {"value", n.value}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"cover", n.cover},
                       {"value", n.value}});
    }
  }
  return {{"num_features", tree.num_features()},
          {"params", params_json(tree.params())},
          {"nodes", std::move(nodes)}};
}

Task task_from_json(const Json& j) {
  const auto kind = parse_task_kind(j.at("task").get<std::string>());
  return kind == TaskKind::kClassification ? Task::classification(j.at("n_classes").get<int>())
                                           : Task::regression();
}

Json task_json(const Task& t) {
  Json j;
  j["task"] = to_string(t.kind);
  if (t.is_classification()) j["n_classes"] = t.n_classes;
  return j;
}

void expect_kind(const Json& j, const char* kind) {
  if (j.value("kind", std::string()) != kind) {
    throw DataError(std::string("model file is not a ") + kind + " model");
  }
}

template <typename F>
auto parse_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& err) {
    throw DataError(std::string("malformed model file: ") + err.what());
  } catch (const InvalidArgument& err) {
    throw DataError(std::string("invalid model file: ") + err.what());
  }
}

}  // namespace

Json to_json(const DecisionTree& tree) {
  Json j{{"kind", "tree"}};
  j.update(tree_body(tree));
  return j;
}

Json to_json(const ForestModel& forest) {
  Json j{{"kind", "forest"}};
  j.update(task_json(forest.task()));
  j["num_features"] = forest.num_features();
  Json outputs = Json::array();
  for (std::size_t c = 0; c < forest.num_outputs(); ++c) {
    Json trees = Json::array();
    for (const auto& t : forest.trees(c)) trees.push_back(tree_body(t));
    outputs.push_back(std::move(trees));
  }
  j["trees"] = std::move(outputs);
  return j;
}

Json to_json(const MlpModel& mlp) {
  Json j{{"kind", "mlp"}};
  j.update(task_json(mlp.task()));
  j["input_mean"] = mlp.input_mean();
  j["input_scale"] = mlp.input_scale();
  j["target_mean"] = mlp.target_mean();
  j["target_scale"] = mlp.target_scale();
  Json layers = Json::array();
  for (const auto& l : mlp.layers()) {
    std::vector<double> w(l.weight.data(), l.weight.data() + l.weight.size());
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"rows", l.weight.rows()}, {"cols", l.weight.cols()}, {"weight", w}, {"bias", b}});
  }
  j["layers"] = std::move(layers);
  return j;
}

namespace {

DecisionTree tree_from_body(const Json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j.at("nodes")) {
    if (n.contains("feature")) {
      nodes.push_back({n.at("feature").get<std::int32_t>(), n.at("threshold").get<double>(),
                       n.at("left").get<NodeId>(), n.at("right").get<NodeId>(),
                       n.at("cover").get<double>(), n.at("value").get<double>()});
    } else {
      nodes.push_back(TreeNode::leaf(n.at("cover").get<double>(), n.at("value").get<double>()));
    }
  }
  const auto& p = j.at("params");
  TreeParams params{p.at("max_depth").get<int>(), p.at("min_samples_leaf").get<int>(),
                    p.at("min_weight_fraction_leaf").get<double>()};
  return DecisionTree(std::move(nodes), j.at("num_features").get<std::size_t>(), params);
}

}  // namespace

DecisionTree tree_from_json(const Json& j) {
  return parse_guard([&] {
    expect_kind(j, "tree");
    return tree_from_body(j);
  });
}

ForestModel forest_from_json(const Json& j) {
  return parse_guard([&] {
    expect_kind(j, "forest");
    std::vector<std::vector<DecisionTree>> trees;
    for (const auto& output : j.at("trees")) {
      auto& list = trees.emplace_back();
      for (const auto& t : output) list.push_back(tree_from_body(t));
    }
    return ForestModel(std::move(trees), task_from_json(j), j.at("num_features").get<std::size_t>());
  });
}

MlpModel mlp_from_json(const Json& j) {
  return parse_guard([&] {
    expect_kind(j, "mlp");
    std::vector<MlpModel::Layer> layers;
    for (const auto& l : j.at("layers")) {
      const auto rows = l.at("rows").get<Eigen::Index>();
      const auto cols = l.at("cols").get<Eigen::Index>();
      const auto w = l.at("weight").get<std::vector<double>>();
      const auto b = l.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows) {
        throw DataError("mlp layer sizes do not match its shape");
      }
      MlpModel::Layer layer{Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, cols),
                            Eigen::Map<const Eigen::VectorXd>(b.data(), rows)};
      layers.push_back(std::move(layer));
    }
    return MlpModel(std::move(layers), task_from_json(j),
                    j.at("input_mean").get<std::vector<double>>(),
                    j.at("input_scale").get<std::vector<double>>(),
                    j.at("target_mean").get<double>(), j.at("target_scale").get<double>());
  });
}

std::unique_ptr<BlackBoxModel> model_from_json(const Json& j) {
  const auto kind = j.value("kind", std::string());
  if (kind == "tree") return std::make_unique<DecisionTree>(tree_from_json(j));
  if (kind == "forest") return std::make_unique<ForestModel>(forest_from_json(j));
  if (kind == "mlp") return std::make_unique<MlpModel>(mlp_from_json(j));
  throw DataError("unknown model kind '" + kind + "'");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw DataError(path.string() + ": " + err.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace limase
