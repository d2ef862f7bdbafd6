#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "limase/error.hpp"
#include "limase/forest.hpp"
#include "limase/sp.hpp"
#include "limase/synth.hpp"
#include "test_util.hpp"

namespace limase {
namespace {

ExplanationMatrix matrix_of(const Matrix& m) {
  ExplanationMatrix s;
  s.values = m;
  s.instance_ids.resize(m.rows());
  std::iota(s.instance_ids.begin(), s.instance_ids.end(), 0);
  return s;
}

ExplanationMatrix random_matrix(RandomStream& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  for (auto& v : m.data()) v = rng.uniform() < 0.5 ? 0.0 : rng.gaussian();
  return matrix_of(m);
}

// Independent coverage: sum of I_j over features with a nonzero entry among picked rows.
double oracle_coverage(const ExplanationMatrix& s, const std::vector<double>& imp,
                       const std::vector<std::size_t>& picked) {
  double total = 0.0;
  for (std::size_t j = 0; j < s.values.cols(); ++j) {
    for (auto i : picked) {
      if (s.values(i, j) != 0.0) {
        total += imp[j];
        break;
      }
    }
  }
  return total;
}

double best_subset(const ExplanationMatrix& s, const std::vector<double>& imp, std::size_t g) {
  const auto n = s.values.rows();
  double best = 0.0;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != g) continue;
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < n; ++i) {
      if ((m >> i) & 1u) picked.push_back(i);
    }
    best = std::max(best, oracle_coverage(s, imp, picked));
  }
  return best;
}

TEST(FeatureImportance, Examples) {
  EXPECT_EQ(feature_importance(matrix_of(Matrix(3, 2))), (std::vector<double>{0, 0}));
  EXPECT_EQ(feature_importance(matrix_of(Matrix{{1, 0}, {4, 0}})),
            (std::vector<double>{std::sqrt(5.0), 0}));
  EXPECT_EQ(feature_importance(matrix_of(Matrix{{-3}})), (std::vector<double>{std::sqrt(3.0)}));
  EXPECT_THROW(feature_importance(ExplanationMatrix{}), InvalidArgument);
}

TEST(FeatureImportance, LiteralMode) {
  const auto s = matrix_of(Matrix{{-3, 2}, {1, 2}});
  const auto imp = feature_importance(s, SignMode::kLiteral);
  EXPECT_EQ(imp[0], 0.0);
  EXPECT_EQ(imp[1], 2.0);
}

TEST(Coverage, Examples) {
  const auto s = matrix_of(Matrix{{1, 0}, {0, 2}});
  const std::vector<double> imp{1, std::sqrt(2.0)};
  EXPECT_EQ(coverage(std::vector<std::size_t>{}, s, imp), 0.0);
  EXPECT_EQ(coverage(std::vector<std::size_t>{0}, s, imp), 1.0);
  EXPECT_EQ(coverage(std::vector<std::size_t>{1}, s, imp), std::sqrt(2.0));
  EXPECT_EQ(coverage(std::vector<std::size_t>{0, 1}, s, imp), 1.0 + std::sqrt(2.0));
  EXPECT_THROW(coverage(std::vector<std::size_t>{2}, s, imp), InvalidArgument);
}

TEST(Coverage, SignModes) {
  const auto s = matrix_of(Matrix{{-1, 0}, {0, 2}});
  const std::vector<double> imp{1, 1};
  EXPECT_EQ(coverage(std::vector<std::size_t>{0}, s, imp, SignMode::kAbsolute), 1.0);
  EXPECT_EQ(coverage(std::vector<std::size_t>{0}, s, imp, SignMode::kLiteral), 0.0);
}

TEST(Coverage, MonotoneAndSubmodular) {
  RandomStream rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_matrix(rng, 7, 5);
    const auto imp = feature_importance(s);
    std::vector<std::size_t> chain;
    std::vector<std::size_t> order(7);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = 6; k > 0; --k) std::swap(order[k], order[rng.uniform_index(k + 1)]);
    const std::size_t probe = order.back();
    double prev_gain = INFINITY;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const double base = coverage(chain, s, imp);
      auto with_probe = chain;
      with_probe.push_back(probe);
      const double gain = coverage(with_probe, s, imp) - base;
      EXPECT_GE(gain, 0.0);
      EXPECT_LE(gain, prev_gain + 1e-12);
      prev_gain = gain;
      chain.push_back(order[k]);
      EXPECT_GE(coverage(chain, s, imp), base);
    }
  }
}

TEST(SubmodularPick, Examples) {
  const auto s = matrix_of(Matrix{{1, 0}, {0, 2}});
  const auto one = submodular_pick(s, 1);
  EXPECT_EQ(one.selected, (std::vector<std::size_t>{1}));
  EXPECT_EQ(one.budget, 1u);
  const auto all = submodular_pick(s, 5);
  EXPECT_EQ(all.selected, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(all.coverage_history.size(), 2u);
  EXPECT_THROW(submodular_pick(s, 0), InvalidArgument);
  EXPECT_THROW(submodular_pick(ExplanationMatrix{}, 1), InvalidArgument);
}

TEST(SubmodularPick, ZeroMatrixPadsDeterministically) {
  const auto r = submodular_pick(matrix_of(Matrix(5, 3)), 3);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.coverage_history, (std::vector<double>{0, 0, 0}));
}

TEST(SubmodularPick, TieBreaksToLowestIndex) {
  const auto r = submodular_pick(matrix_of(Matrix{{0, 1}, {1, 0}, {1, 0}}), 1);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{1}));
}

TEST(SubmodularPick, GreedyGuaranteeAgainstBruteForce) {
  RandomStream rng(2);
  const double bound = 1.0 - 1.0 / std::numbers::e;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(7);
    const std::size_t g = 1 + rng.uniform_index(4);
    const auto s = random_matrix(rng, n, 6);
    const auto r = submodular_pick(s, g);
    const auto imp = feature_importance(s);
    ASSERT_EQ(r.selected.size(), std::min(g, n));
    EXPECT_GE(oracle_coverage(s, imp, r.selected) + 1e-12, bound * best_subset(s, imp, std::min(g, n)));
    for (std::size_t k = 1; k < r.coverage_history.size(); ++k) {
      EXPECT_GE(r.coverage_history[k], r.coverage_history[k - 1]);
    }
    double total = 0.0;
    for (double v : imp) total += v;
    EXPECT_LE(r.coverage_history.back(), total + 1e-12);
    auto sorted = r.selected;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  }
}

TEST(SubmodularPick, ScaleInvariantSelection) {
  RandomStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_matrix(rng, 9, 5);
    auto scaled = s;
    for (auto& v : scaled.values.data()) v *= 3.7;
    EXPECT_EQ(submodular_pick(s, 4).selected, submodular_pick(scaled, 4).selected);
  }
}

TEST(SpExplain, EndToEnd) {
  const auto data = make_synthetic({120, 5, 3, 0.1, 0, 1});
  ForestParams p;
  p.n_trees = 8;
  RandomStream rng(1);
  const auto forest = fit_random_forest(data, p, rng);
  const std::vector<std::size_t> ids{3, 10, 20, 40, 77, 100};
  LimaseConfig c;
  c.n_samples = 200;
  const auto a = sp_explain(forest, data, ids, c, 2);
  const auto b = sp_explain(forest, data, ids, c, 2, 3);
  EXPECT_EQ(a.pick.selected, b.pick.selected);
  EXPECT_EQ(a.matrix.values, b.matrix.values);
  EXPECT_EQ(a.matrix.instance_ids, ids);
  EXPECT_EQ(a.pick.selected.size(), 2u);
  const auto one = sp_explain(forest, data, ids, c, 1);
  double best = -1.0;
  std::size_t arg = 0;
  const auto imp = feature_importance(one.matrix);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double cov = coverage(std::vector<std::size_t>{i}, one.matrix, imp);
    if (cov > best) {
      best = cov;
      arg = i;
    }
  }
  EXPECT_EQ(one.pick.selected, (std::vector<std::size_t>{arg}));
  EXPECT_THROW(sp_explain(forest, data, std::vector<std::size_t>{500}, c, 1), InvalidArgument);
}

}  // namespace
}  // namespace limase
