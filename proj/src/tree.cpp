#include "limase/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "limase/error.hpp"

namespace limase {

void TreeParams::validate() const {
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
  if (!(min_weight_fraction_leaf >= 0.0 && min_weight_fraction_leaf <= 0.5)) {
    throw InvalidArgument("min_weight_fraction_leaf must be in [0, 0.5]");
  }
}

namespace {

bool close_rel(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * scale;
}

// Depth-first order of reachable nodes; throws on dangling or shared children.
std::vector<std::pair<NodeId, int>> walk(const std::vector<TreeNode>& nodes) {
  if (nodes.empty()) throw InvalidArgument("tree has no nodes");
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::pair<NodeId, int>> order;
  std::vector<std::pair<NodeId, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size()) {
      throw InvalidArgument("tree references missing node " + std::to_string(id));
    }
    if (seen[static_cast<std::size_t>(id)]) {
      throw InvalidArgument("node " + std::to_string(id) + " is reachable twice");
    }
    seen[static_cast<std::size_t>(id)] = 1;
    order.emplace_back(id, depth);
    const auto& n = nodes[static_cast<std::size_t>(id)];
    if (!n.is_leaf()) {
      stack.emplace_back(n.right, depth + 1);
      stack.emplace_back(n.left, depth + 1);
    }
  }
  if (order.size() != nodes.size()) throw InvalidArgument("tree has unreachable nodes");
  return order;
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t num_features,
                           TreeParams params)
    : nodes_(std::move(nodes)), num_features_(num_features), params_(params) {
  params_.validate();
  const auto order = walk(nodes_);
  for (const auto& [id, depth] : order) {
    if (depth > params_.max_depth) {
      throw InvalidArgument("tree depth exceeds max_depth " +
                            std::to_string(params_.max_depth));
    }
    const auto& n = node(id);
    if (!(n.cover > 0.0) || !std::isfinite(n.cover) || !std::isfinite(n.value)) {
      throw InvalidArgument("node " + std::to_string(id) + " needs a positive finite cover");
    }
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= num_features_) {
      throw InvalidArgument("node " + std::to_string(id) + " splits on feature " +
                            std::to_string(n.feature) + " of " +
                            std::to_string(num_features_));
    }
    if (!std::isfinite(n.threshold)) throw InvalidArgument("non-finite threshold");
    const auto& l = node(n.left);
    const auto& r = node(n.right);
    if (!close_rel(n.cover, l.cover + r.cover, n.cover)) {
      throw InvalidArgument("node " + std::to_string(id) + ": cover != sum of child covers");
    }
    const double expected = (l.cover * l.value + r.cover * r.value) / n.cover;
    const double scale = std::max({std::abs(l.value), std::abs(r.value), std::abs(n.value)});
    if (!close_rel(n.value, expected, scale)) {
      throw InvalidArgument("node " + std::to_string(id) +
                            ": value is not the cover-weighted mean of its children");
    }
  }
}

DecisionTree DecisionTree::from_leaves(std::vector<TreeNode> nodes, std::size_t num_features,
                                       TreeParams params) {
  const auto order = walk(nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& n = nodes[static_cast<std::size_t>(it->first)];
    if (n.is_leaf()) continue;
    const auto& l = nodes[static_cast<std::size_t>(n.left)];
    const auto& r = nodes[static_cast<std::size_t>(n.right)];
    n.cover = l.cover + r.cover;
    n.value = (l.cover * l.value + r.cover * r.value) / n.cover;
  }
  return DecisionTree(std::move(nodes), num_features, params);
}

int DecisionTree::depth() const {
  int best = 0;
  for (const auto& [id, d] : walk(nodes_)) best = std::max(best, d);
  return best;
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

bool DecisionTree::splits_on(std::size_t feature) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const TreeNode& n) {
    return !n.is_leaf() && static_cast<std::size_t>(n.feature) == feature;
  });
}

NodeId DecisionTree::leaf_for(std::span<const double> x) const {
  if (x.size() != num_features_) {
    throw InvalidArgument("tree expects " + std::to_string(num_features_) +
                          " features, got " + std::to_string(x.size()));
  }
  NodeId id = 0;
  while (!node(id).is_leaf()) {
    const auto& n = node(id);
    id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return id;
}

double DecisionTree::predict_one(std::span<const double> x) const {
  return node(leaf_for(x)).value;
}

ModelOutput DecisionTree::predict(const Matrix& rows) const {
  ModelOutput out(rows.rows(), 1);
  for (std::size_t i = 0; i < rows.rows(); ++i) out(i, 0) = predict_one(rows.row(i));
  return out;
}

double predict_tree(const DecisionTree& tree, std::span<const double> x) {
  return tree.predict_one(x);
}

namespace {

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, std::span<const double> y, std::span<const double> w,
             const TreeParams& params, SplitSampling sampling)
      : x_(x), y_(y), w_(w), params_(params), sampling_(sampling) {}

  std::vector<TreeNode> grow(const std::vector<std::size_t>& active) {
    double total = 0.0;
    for (auto i : active) total += w_[i];
    min_leaf_weight_ = params_.min_weight_fraction_leaf * total;
    // One ordering per feature. Each node owns the same [begin, end) range in
    // every ordering; splitting stably partitions that range.
    orders_.assign(x_.cols(), active);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      std::sort(orders_[f].begin(), orders_[f].end(), [&](std::size_t a, std::size_t b) {
        const double va = x_(a, f);
        const double vb = x_(b, f);
        return va < vb || (va == vb && a < b);
      });
    }
    goes_left_.assign(x_.rows(), 0);
    scratch_.resize(active.size());
    build(0, active.size(), 0);
    return std::move(nodes_);
  }

 private:
  using Range = std::span<const std::size_t>;

  NodeId build(std::size_t begin, std::size_t end, int depth) {
    const Range idx(orders_.front().data() + begin, end - begin);
    double wsum = 0.0;
    double wy = 0.0;
    for (auto i : idx) {
      wsum += w_[i];
      wy += w_[i] * y_[i];
    }
    const double value = wy / wsum;
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(TreeNode::leaf(wsum, value));

    if (depth >= params_.max_depth) return id;
    if (idx.size() < 2 * static_cast<std::size_t>(params_.min_samples_leaf)) return id;
    const bool constant = std::all_of(idx.begin(), idx.end(),
                                      [&](std::size_t i) { return y_[i] == y_[idx.front()]; });
    if (constant) return id;

    double sse = 0.0;
    for (auto i : idx) sse += w_[i] * (y_[i] - value) * (y_[i] - value);
    const auto split = best_split(begin, end, value, sse);
    if (!split.found) return id;

    std::size_t n_left = 0;
    for (auto i : idx) {
      goes_left_[i] = x_(i, split.feature) <= split.threshold;
      n_left += goes_left_[i];
    }
    for (auto& order : orders_) {
      std::size_t l = begin;
      std::size_t r = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const auto i = order[k];
        if (goes_left_[i]) {
          order[l++] = i;
        } else {
          scratch_[r++] = i;
        }
      }
      std::copy_n(scratch_.begin(), r, order.begin() + static_cast<std::ptrdiff_t>(l));
    }
    const NodeId left = build(begin, begin + n_left, depth + 1);
    const NodeId right = build(begin + n_left, end, depth + 1);
    auto& n = nodes_[static_cast<std::size_t>(id)];
    n.feature = static_cast<std::int32_t>(split.feature);
    n.threshold = split.threshold;
    n.left = left;
    n.right = right;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> f(x_.cols());
    std::iota(f.begin(), f.end(), 0);
    const auto k = sampling_.max_features;
    if (k == 0 || k >= f.size() || sampling_.rng == nullptr) return f;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + sampling_.rng->uniform_index(f.size() - i);
      std::swap(f[i], f[j]);
    }
    f.resize(k);
    std::sort(f.begin(), f.end());
    return f;
  }

  // Maximizes Sl^2/Wl + Sr^2/Wr over centered targets, which is the same as
  // minimizing the summed weighted SSE of the two children.
  SplitCandidate best_split(std::size_t begin, std::size_t end, double mean, double sse) {
    SplitCandidate best;
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    const Range idx(orders_.front().data() + begin, end - begin);
    double total_w = 0.0;
    double total_s = 0.0;
    for (auto i : idx) {
      total_w += w_[i];
      total_s += w_[i] * (y_[i] - mean);
    }
    for (auto f : candidate_features()) {
      const Range order(orders_[f].data() + begin, end - begin);
      double wl = 0.0;
      double sl = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const auto i = order[k];
        wl += w_[i];
        sl += w_[i] * (y_[i] - mean);
        const double lo = x_(i, f);
        const double hi = x_(order[k + 1], f);
        if (!(lo < hi)) continue;
        const std::size_t nl = k + 1;
        if (nl < min_leaf || order.size() - nl < min_leaf) continue;
        const double wr = total_w - wl;
        if (wl < min_leaf_weight_ || wr < min_leaf_weight_ || wl <= 0.0 || wr <= 0.0) continue;
        const double sr = total_s - sl;
        const double gain = sl * sl / wl + sr * sr / wr;
        // Relative slack so rounding cannot break a tie between features.
        if (gain > best.gain * (1.0 + 1e-12)) {
          double thr = lo + (hi - lo) / 2.0;
          if (!(thr < hi)) thr = lo;
          best = {true, f, thr, gain};
        }
      }
    }
    // Gains at rounding level are not improvements.
    if (best.found && best.gain <= 1e-12 * sse) best.found = false;
    return best;
  }

  const Matrix& x_;
  std::span<const double> y_;
  std::span<const double> w_;
  TreeParams params_;
  SplitSampling sampling_;
  double min_leaf_weight_ = 0.0;
  std::vector<std::vector<std::size_t>> orders_;
  std::vector<std::size_t> scratch_;
  std::vector<char> goes_left_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree fit_tree(const Matrix& x, std::span<const double> y, std::span<const double> w,
                      const TreeParams& params, SplitSampling sampling) {
  params.validate();
  const auto n = x.rows();
  if (n == 0) throw InvalidArgument("fit_tree: no rows");
  if (y.size() != n || w.size() != n) {
    throw InvalidArgument("fit_tree: X, y and w lengths differ");
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i]) || !std::isfinite(w[i])) {
      throw InvalidArgument("fit_tree: non-finite target or weight at row " +
                            std::to_string(i));
    }
    if (w[i] < 0.0) throw InvalidArgument("fit_tree: negative weight at row " + std::to_string(i));
    for (double v : x.row(i)) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("fit_tree: non-finite feature at row " + std::to_string(i));
      }
    }
    if (w[i] > 0.0) active.push_back(i);
  }
  if (active.empty()) throw InvalidArgument("fit_tree: all sample weights are zero");
  TreeGrower grower(x, y, w, params, sampling);
  return DecisionTree(grower.grow(active), x.cols(), params);
}

}  // namespace limase
