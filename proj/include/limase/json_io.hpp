#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "limase/dataset.hpp"
#include "limase/forest.hpp"
#include "limase/limase.hpp"
#include "limase/mlp.hpp"
#include "limase/shapley.hpp"
#include "limase/sp.hpp"
#include "limase/tree.hpp"
#include "limase/viz.hpp"

namespace limase {

using Json = nlohmann::ordered_json;

// Records. `with_timing` controls whether elapsed_ms is written; leaving it
// out keeps reruns byte-identical.
Json to_json(const ShapExplanation& e, const std::vector<std::string>& feature_names,
             bool with_timing = true);
Json to_json(const LimaseResult& r, const std::vector<std::string>& feature_names,
             bool with_timing = true);
Json to_json(const SpResult& r);
Json to_json(const ExplanationMatrix& m, const std::vector<std::string>& feature_names);
Json to_json(const ForcePlotData& p);
Json to_json(const SummaryPlotData& p);
Json dataset_summary(const Dataset& data);

ShapExplanation explanation_from_json(const Json& j);

// Model files: {"kind": "tree" | "forest" | "mlp", ...}.
Json to_json(const DecisionTree& tree);
Json to_json(const ForestModel& forest);
Json to_json(const MlpModel& mlp);
DecisionTree tree_from_json(const Json& j);
ForestModel forest_from_json(const Json& j);
MlpModel mlp_from_json(const Json& j);
std::unique_ptr<BlackBoxModel> model_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
// Two-space indented dump followed by a newline.
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace limase
