#include <gtest/gtest.h>

#include "limase/error.hpp"
#include "limase/json_io.hpp"
#include "limase/synth.hpp"
#include "test_util.hpp"

namespace limase {
namespace {

Json round_trip(const Json& j, const std::string& name) {
  const auto path = testing::temp_dir("json_io") / name;
  write_json(j, path);
  return read_json(path);
}

void expect_same_predictions(const BlackBoxModel& a, const BlackBoxModel& b, const Dataset& data) {
  EXPECT_EQ(a.predict(data.rows()), b.predict(data.rows()));
  EXPECT_EQ(a.task(), b.task());
  EXPECT_EQ(a.num_features(), b.num_features());
}

TEST(JsonIo, ExplanationRecord) {
  ShapExplanation e;
  e.explainer = "treeshap";
  e.base_value = 0.1;
  e.phi = {1.0 / 3.0, -2.5e-17};
  e.fx = e.base_value + e.phi_sum();
  e.instance = {4, 5};
  e.class_index = 1;
  e.elapsed_ms = 3.5;
  const auto j = to_json(e, {"a", "b"});
  EXPECT_EQ(j["feature_names"], (Json{"a", "b"}));
  EXPECT_EQ(j["class_index"], 1);
  EXPECT_EQ(j["elapsed_ms"], 3.5);
  const auto back = explanation_from_json(round_trip(j, "e.json"));
  EXPECT_EQ(back.phi, e.phi);
  EXPECT_EQ(back.base_value, e.base_value);
  EXPECT_EQ(back.fx, e.fx);
  EXPECT_EQ(back.instance, e.instance);
  EXPECT_EQ(back.class_index, e.class_index);
  EXPECT_EQ(back.explainer, "treeshap");

  const auto quiet = to_json(e, {"a", "b"}, false);
  EXPECT_FALSE(quiet.contains("elapsed_ms"));
  EXPECT_THROW(explanation_from_json(Json{{"explainer", "x"}}), DataError);
}

TEST(JsonIo, KeyOrderIsStable) {
  ShapExplanation e;
  e.explainer = "kernelshap";
  e.phi = {1};
  e.fx = 1;
  e.instance = {0};
  const auto text = to_json(e, {"z"}, false).dump();
  EXPECT_LT(text.find("explainer"), text.find("base_value"));
  EXPECT_LT(text.find("base_value"), text.find("phi"));
}

TEST(JsonIo, SpAndMatrixRecords) {
  SpResult r;
  r.selected = {2, 0};
  r.importance = {1, 2};
  r.coverage_history = {2, 3};
  r.budget = 2;
  const auto j = to_json(r);
  EXPECT_EQ(j["selected"], (Json{2, 0}));
  EXPECT_EQ(j["budget"], 2);
  ExplanationMatrix m;
  m.values = Matrix{{1, 2}, {3, 4}};
  m.instance_ids = {7, 8};
  const auto jm = to_json(m, {"a", "b"});
  EXPECT_EQ(jm["phi"][1][0], 3.0);
  EXPECT_EQ(jm["instance_ids"], (Json{7, 8}));
}

TEST(JsonIo, DatasetSummary) {
  const auto data = make_synthetic({50, 3, 2, 0.1, 2, 1});
  const auto j = dataset_summary(data);
  EXPECT_EQ(j["rows"], 50);
  EXPECT_EQ(j["features"], 3);
  EXPECT_EQ(j["task"], "classification");
  EXPECT_EQ(j["n_classes"], 2);
  ASSERT_EQ(j["feature_stats"].size(), 3u);
  EXPECT_EQ(j["feature_stats"][1]["mean"], data.features()[1].mean);
}

TEST(JsonIo, TreeRoundTrip) {
  const auto data = make_synthetic({200, 4, 3, 0.1, 0, 2});
  const auto tree = fit_tree(data.rows(), data.target(), std::vector<double>(200, 1.0), TreeParams{5, 2, 0});
  const auto back = tree_from_json(round_trip(to_json(tree), "tree.json"));
  EXPECT_EQ(back, tree);
  expect_same_predictions(tree, back, data);
  EXPECT_THROW(forest_from_json(to_json(tree)), DataError);
}

TEST(JsonIo, ForestRoundTrip) {
  const auto data = make_synthetic({200, 4, 3, 0.1, 3, 3});
  ForestParams p;
  p.n_trees = 5;
  RandomStream rng(1);
  const auto forest = fit_random_forest(data, p, rng);
  const auto loaded = model_from_json(round_trip(to_json(forest), "forest.json"));
  expect_same_predictions(forest, *loaded, data);
  EXPECT_NE(dynamic_cast<const ForestModel*>(loaded.get()), nullptr);
}

TEST(JsonIo, MlpRoundTrip) {
  const auto data = make_synthetic({200, 4, 3, 0.1, 0, 4});
  MlpParams p;
  p.hidden = {6, 3};
  p.epochs = 5;
  RandomStream rng(2);
  const auto mlp = fit_mlp(data, p, rng);
  const auto loaded = model_from_json(round_trip(to_json(mlp), "mlp.json"));
  expect_same_predictions(mlp, *loaded, data);
}

TEST(JsonIo, BadModelFiles) {
  EXPECT_THROW(model_from_json(Json{{"kind", "svm"}}), DataError);
  EXPECT_THROW(tree_from_json(Json{{"kind", "tree"}}), DataError);
  const auto dir = testing::temp_dir("json_io_bad");
  testing::write_text(dir / "broken.json", "{\"kind\": ");
  EXPECT_THROW(read_json(dir / "broken.json"), DataError);
  EXPECT_THROW(read_json(dir / "missing.json"), DataError);
}

}  // namespace
}  // namespace limase
