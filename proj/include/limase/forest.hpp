#pragma once

#include <cstddef>
#include <vector>

#include "limase/dataset.hpp"
#include "limase/model.hpp"
#include "limase/random.hpp"
#include "limase/tree.hpp"

namespace limase {

struct ForestParams {
  int n_trees = 50;
  TreeParams tree{8, 1, 0.0};
  bool bootstrap = true;
  // Features tried per split; 0 selects floor(sqrt(d)).
  std::size_t max_features = 0;
  std::size_t threads = 1;
};

// Bagged regression trees. Regression keeps one tree list. Classification
// keeps one list per class, each tree fit to the 0/1 indicator of its class;
// class scores are averaged and then renormalized into a probability vector.
class ForestModel : public BlackBoxModel {
 public:
  ForestModel(std::vector<std::vector<DecisionTree>> trees_per_output, Task task,
              std::size_t num_features);

  ModelOutput predict(const Matrix& rows) const override;
  Task task() const override { return task_; }
  std::size_t num_features() const override { return num_features_; }

  std::size_t num_outputs() const { return trees_.size(); }
  std::size_t num_trees() const { return trees_.front().size(); }
  // Trees scoring output column `output` (the class index, or 0).
  const std::vector<DecisionTree>& trees(std::size_t output) const { return trees_.at(output); }

  // Mean of the member trees for one output, before renormalization.
  double raw_score(std::span<const double> x, std::size_t output) const;

 private:
  std::vector<std::vector<DecisionTree>> trees_;
  Task task_;
  std::size_t num_features_;
};

// Each tree is fit on a bootstrap resample, expressed as integer sample
// weights, with sqrt(d) candidate features per split. Per-tree seeds are
// derived from `rng` before any tree is fit, so results do not depend on the
// thread count.
ForestModel fit_random_forest(const Dataset& data, const ForestParams& params,
                              RandomStream& rng);

}  // namespace limase
