#include "limase/shapley.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "limase/error.hpp"

namespace limase {

double ShapExplanation::phi_sum() const {
  return std::accumulate(phi.begin(), phi.end(), 0.0);
}

double ShapExplanation::efficiency_gap() const {
  return std::abs(base_value + phi_sum() - fx);
}

namespace {

double conditional_value(const DecisionTree& tree, std::span<const double> x, Coalition s,
                         NodeId id) {
  const auto& n = tree.node(id);
  if (n.is_leaf()) return n.value;
  const auto f = static_cast<std::size_t>(n.feature);
  if (s.contains(f)) {
    return conditional_value(tree, x, s, x[f] <= n.threshold ? n.left : n.right);
  }
  const auto& l = tree.node(n.left);
  const auto& r = tree.node(n.right);
  return (l.cover * conditional_value(tree, x, s, n.left) +
          r.cover * conditional_value(tree, x, s, n.right)) /
         n.cover;
}

void check_dimension(const DecisionTree& tree, std::span<const double> x) {
  if (x.size() != tree.num_features()) {
    throw InvalidArgument("tree expects " + std::to_string(tree.num_features()) +
                          " features, got " + std::to_string(x.size()));
  }
}

// Binomial coefficient as an exact integer; fine for n <= 63 at the sizes used.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// One element of the unique feature path. pweight holds the summed weight of
// all subsets of the path's features of a given size.
struct PathElement {
  std::int32_t feature;
  double zero_fraction;
  double one_fraction;
  double pweight;
};

class TreeShapWalker {
 public:
  TreeShapWalker(const DecisionTree& tree, std::span<const double> x, std::vector<double>& phi)
      : tree_(tree), x_(x), phi_(phi) {
    const auto depth = static_cast<std::size_t>(tree.depth());
    path_.resize((depth + 2) * (depth + 3) / 2);
  }

  void run() { recurse(0, 0, 0, 0, 1.0, 1.0, -1); }

 private:
  static void extend(PathElement* path, int depth, double zero_fraction, double one_fraction,
                     std::int32_t feature) {
    path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
    for (int i = depth - 1; i >= 0; --i) {
      path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / (depth + 1);
      path[i].pweight = zero_fraction * path[i].pweight * (depth - i) / (depth + 1);
    }
  }

  static void unwind(PathElement* path, int depth, int index) {
    const double one_fraction = path[index].one_fraction;
    const double zero_fraction = path[index].zero_fraction;
    double next_one = path[depth].pweight;
    for (int i = depth - 1; i >= 0; --i) {
      if (one_fraction != 0.0) {
        const double tmp = path[i].pweight;
        path[i].pweight = next_one * (depth + 1) / ((i + 1) * one_fraction);
        next_one = tmp - path[i].pweight * zero_fraction * (depth - i) / (depth + 1);
      } else {
        path[i].pweight = path[i].pweight * (depth + 1) / (zero_fraction * (depth - i));
      }
    }
    for (int i = index; i < depth; ++i) {
      path[i].feature = path[i + 1].feature;
      path[i].zero_fraction = path[i + 1].zero_fraction;
      path[i].one_fraction = path[i + 1].one_fraction;
    }
  }

  // Total pweight the path would have if element `index` were unwound.
  static double unwound_sum(const PathElement* path, int depth, int index) {
    const double one_fraction = path[index].one_fraction;
    const double zero_fraction = path[index].zero_fraction;
    double next_one = path[depth].pweight;
    double total = 0.0;
    for (int i = depth - 1; i >= 0; --i) {
      if (one_fraction != 0.0) {
        const double tmp = next_one * (depth + 1) / ((i + 1) * one_fraction);
        total += tmp;
        next_one = path[i].pweight - tmp * zero_fraction * (depth - i) / (depth + 1);
      } else {
        total += path[i].pweight / (zero_fraction * (depth - i) / (depth + 1));
      }
    }
    return total;
  }

  // Each level owns a copy of its parent's path at path_[offset].
  void recurse(NodeId id, std::size_t parent_offset, std::size_t offset, int depth,
               double zero_fraction, double one_fraction, std::int32_t feature) {
    PathElement* path = path_.data() + offset;
    if (depth > 0) std::copy_n(path_.data() + parent_offset, depth, path);
    extend(path, depth, zero_fraction, one_fraction, feature);

    const auto& n = tree_.node(id);
    if (n.is_leaf()) {
      for (int i = 1; i <= depth; ++i) {
        const double w = unwound_sum(path, depth, i);
        const auto& el = path[i];
        phi_[static_cast<std::size_t>(el.feature)] +=
            w * (el.one_fraction - el.zero_fraction) * n.value;
      }
      return;
    }

    const auto split = static_cast<std::size_t>(n.feature);
    const NodeId hot = x_[split] <= n.threshold ? n.left : n.right;
    const NodeId cold = hot == n.left ? n.right : n.left;
    const double hot_zero = tree_.node(hot).cover / n.cover;
    const double cold_zero = tree_.node(cold).cover / n.cover;
    double incoming_zero = 1.0;
    double incoming_one = 1.0;

    // A feature already on the path is removed and re-added with the
    // combined fractions.
    int unique_depth = depth;
    for (int k = 1; k <= depth; ++k) {
      if (path[k].feature == n.feature) {
        incoming_zero = path[k].zero_fraction;
        incoming_one = path[k].one_fraction;
        unwind(path, unique_depth, k);
        --unique_depth;
        break;
      }
    }

    const std::size_t child_offset = offset + static_cast<std::size_t>(unique_depth) + 1;
    recurse(hot, offset, child_offset, unique_depth + 1, hot_zero * incoming_zero,
            incoming_one, n.feature);
    recurse(cold, offset, child_offset, unique_depth + 1, cold_zero * incoming_zero, 0.0,
            n.feature);
  }

  const DecisionTree& tree_;
  std::span<const double> x_;
  std::vector<double>& phi_;
  std::vector<PathElement> path_;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

double tree_conditional_value(const DecisionTree& tree, std::span<const double> x, Coalition s) {
  check_dimension(tree, x);
  return conditional_value(tree, x, s, 0);
}

std::vector<double> shapley_brute_force(const CoalitionValueFn& v, std::size_t d) {
  if (d > kMaxBruteForceFeatures) {
    throw InvalidArgument("brute-force Shapley supports at most " +
                          std::to_string(kMaxBruteForceFeatures) + " features, got " +
                          std::to_string(d));
  }
  std::vector<double> phi(d, 0.0);
  if (d == 0) return phi;
  const std::uint32_t count = 1u << d;
  std::vector<double> values(count);
  for (std::uint32_t m = 0; m < count; ++m) values[m] = v(Coalition(m));

  std::vector<double> weight(d);
  for (std::size_t s = 0; s < d; ++s) {
    weight[s] = 1.0 / static_cast<double>(d * binomial(d - 1, s));
  }
  for (std::size_t i = 0; i < d; ++i) {
    const std::uint32_t bit = 1u << i;
    double acc = 0.0;
    for (std::uint32_t m = 0; m < count; ++m) {
      if (m & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(m))] * (values[m | bit] - values[m]);
    }
    phi[i] = acc;
  }
  return phi;
}

ShapExplanation tree_shap(const DecisionTree& tree, std::span<const double> x) {
  check_dimension(tree, x);
  const auto start = Clock::now();
  ShapExplanation e;
  e.explainer = "treeshap";
  e.phi.assign(tree.num_features(), 0.0);
  e.instance.assign(x.begin(), x.end());
  e.base_value = tree.root().value;
  e.fx = tree.predict_one(x);
  if (!tree.root().is_leaf()) TreeShapWalker(tree, x, e.phi).run();
  e.elapsed_ms = ms_since(start);
  return e;
}

ShapExplanation forest_shap(const ForestModel& forest, std::span<const double> x,
                            std::optional<int> class_index) {
  const auto start = Clock::now();
  const Task task = forest.task();
  std::size_t output = 0;
  if (!task.is_classification()) {
    if (class_index) throw InvalidArgument("class index given for a regression forest");
  } else if (class_index) {
    if (*class_index < 0 || *class_index >= task.n_classes) {
      throw InvalidArgument("class index " + std::to_string(*class_index) + " out of range");
    }
    output = static_cast<std::size_t>(*class_index);
  } else {
    Matrix probe(0, x.size());
    probe.append_row(x);
    const auto p = forest.predict(probe);
    for (std::size_t c = 1; c < p.cols(); ++c) {
      if (p(0, c) > p(0, output)) output = c;
    }
  }

  const auto& trees = forest.trees(output);
  ShapExplanation e;
  e.explainer = "treeshap";
  e.phi.assign(forest.num_features(), 0.0);
  e.instance.assign(x.begin(), x.end());
  for (const auto& t : trees) {
    const auto te = tree_shap(t, x);
    for (std::size_t j = 0; j < e.phi.size(); ++j) e.phi[j] += te.phi[j];
    e.base_value += te.base_value;
    e.fx += te.fx;
  }
  const double inv = 1.0 / static_cast<double>(trees.size());
  for (auto& v : e.phi) v *= inv;
  e.base_value *= inv;
  e.fx *= inv;
  if (task.is_classification()) e.class_index = static_cast<int>(output);
  e.elapsed_ms = ms_since(start);
  return e;
}

}  // namespace limase
