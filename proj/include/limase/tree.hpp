#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "limase/matrix.hpp"
#include "limase/model.hpp"
#include "limase/random.hpp"

namespace limase {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// One node of a binary regression tree. Internal nodes route x to `left`
// iff x[feature] <= threshold. `cover` is the total sample weight that reached
// the node during training and `value` the weight-weighted mean target.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  double cover = 0.0;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;

  static TreeNode leaf(double cover, double value) {
    return {-1, 0.0, kNoNode, kNoNode, cover, value};
  }
  static TreeNode split(std::int32_t feature, double threshold, NodeId left, NodeId right) {
    return {feature, threshold, left, right, 0.0, 0.0};
  }
};

struct TreeParams {
  int max_depth = 6;
  int min_samples_leaf = 5;
  double min_weight_fraction_leaf = 0.0;

  void validate() const;
  bool operator==(const TreeParams&) const = default;
};

// Immutable regression tree rooted at node 0. Also usable directly as a
// regression black box.
class DecisionTree : public BlackBoxModel {
 public:
  // Validates structure and the cover/value recurrences (relative 1e-9).
  DecisionTree(std::vector<TreeNode> nodes, std::size_t num_features, TreeParams params);

  // Fills cover and value of every internal node from its children, so only
  // leaves need to be specified by the caller. Nodes must form a tree rooted
  // at 0.
  static DecisionTree from_leaves(std::vector<TreeNode> nodes, std::size_t num_features,
                                  TreeParams params);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const TreeNode& root() const { return nodes_.front(); }
  const TreeParams& params() const { return params_; }
  std::size_t num_features() const override { return num_features_; }
  Task task() const override { return Task::regression(); }

  int depth() const;
  std::size_t num_leaves() const;
  bool splits_on(std::size_t feature) const;

  // Leaf reached by x under the "<= goes left" rule.
  NodeId leaf_for(std::span<const double> x) const;
  double predict_one(std::span<const double> x) const;
  ModelOutput predict(const Matrix& rows) const override;

  bool operator==(const DecisionTree& other) const {
    return nodes_ == other.nodes_ && num_features_ == other.num_features_;
  }

 private:
  std::vector<TreeNode> nodes_;
  std::size_t num_features_;
  TreeParams params_;
};

// Per-split feature subsampling, used by the random forest. max_features = 0
// means every feature is a candidate.
struct SplitSampling {
  std::size_t max_features = 0;
  RandomStream* rng = nullptr;
};

// Greedy weighted CART on squared error. Rows with zero weight are ignored
// entirely, including for threshold placement. Thresholds sit at midpoints of
// consecutive distinct values; ties go to the lowest feature, then the lowest
// threshold.
DecisionTree fit_tree(const Matrix& x, std::span<const double> y, std::span<const double> w,
                      const TreeParams& params, SplitSampling sampling = {});

double predict_tree(const DecisionTree& tree, std::span<const double> x);

}  // namespace limase
