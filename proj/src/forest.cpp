#include "limase/forest.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "limase/error.hpp"
#include "limase/parallel.hpp"

namespace limase {

ForestModel::ForestModel(std::vector<std::vector<DecisionTree>> trees_per_output, Task task,
                         std::size_t num_features)
    : trees_(std::move(trees_per_output)), task_(task), num_features_(num_features) {
  if (trees_.size() != task_.output_width()) {
    throw InvalidArgument("forest needs one tree list per output");
  }
  const auto count = trees_.front().size();
  if (count == 0) throw InvalidArgument("forest has no trees");
  for (const auto& list : trees_) {
    if (list.size() != count) throw InvalidArgument("forest outputs have unequal tree counts");
    for (const auto& t : list) {
      if (t.num_features() != num_features_) {
        throw InvalidArgument("forest member has a different feature count");
      }
    }
  }
}

double ForestModel::raw_score(std::span<const double> x, std::size_t output) const {
  const auto& list = trees_.at(output);
  double sum = 0.0;
  for (const auto& t : list) sum += t.predict_one(x);
  return sum / static_cast<double>(list.size());
}

ModelOutput ForestModel::predict(const Matrix& rows) const {
  const auto k = trees_.size();
  ModelOutput out(rows.rows(), k);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const auto x = rows.row(i);
    if (x.size() != num_features_) {
      throw InvalidArgument("forest expects " + std::to_string(num_features_) + " features");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      out(i, c) = raw_score(x, c);
      total += out(i, c);
    }
    if (!task_.is_classification()) continue;
    for (std::size_t c = 0; c < k; ++c) {
      out(i, c) = total > 0.0 ? out(i, c) / total : 1.0 / static_cast<double>(k);
    }
  }
  return out;
}

ForestModel fit_random_forest(const Dataset& data, const ForestParams& params,
                              RandomStream& rng) {
  if (data.num_rows() == 0) throw InvalidArgument("fit_random_forest: empty dataset");
  if (params.n_trees < 1) throw InvalidArgument("fit_random_forest: n_trees must be >= 1");
  params.tree.validate();
  const auto n = data.num_rows();
  const auto d = data.num_features();
  const auto task = data.task();
  const auto k = task.output_width();
  const std::size_t max_features =
      params.max_features > 0
          ? params.max_features
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));

  std::vector<std::vector<double>> targets(k, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (task.is_classification()) {
      targets[static_cast<std::size_t>(data.target()[i])][i] = 1.0;
    } else {
      targets[0][i] = data.target()[i];
    }
  }

  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  std::vector<std::uint64_t> seeds(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) seeds[t] = derive_seed(rng.seed(), t);
  rng.next_u64();

  std::vector<std::vector<std::optional<DecisionTree>>> slots(
      k, std::vector<std::optional<DecisionTree>>(n_trees));
  parallel_for(n_trees, params.threads, [&](std::size_t t) {
    RandomStream tree_rng(seeds[t]);
    std::vector<double> weights(n, 1.0);
    if (params.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t draw = 0; draw < n; ++draw) weights[tree_rng.uniform_index(n)] += 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      slots[c][t] = fit_tree(data.rows(), targets[c], weights, params.tree,
                             SplitSampling{max_features, &tree_rng});
    }
  });

  std::vector<std::vector<DecisionTree>> trees(k);
  for (std::size_t c = 0; c < k; ++c) {
    trees[c].reserve(n_trees);
    for (auto& slot : slots[c]) trees[c].push_back(std::move(*slot));
  }
  return ForestModel(std::move(trees), task, d);
}

}  // namespace limase
