#include <gtest/gtest.h>

#include <cmath>

#include "limase/error.hpp"
#include "limase/tree.hpp"
#include "test_util.hpp"

namespace limase {
namespace {

DecisionTree stump() {
  const Matrix x{{0}, {1}, {2}, {3}};
  const std::vector<double> y{0, 0, 4, 4};
  const std::vector<double> w(4, 1.0);
  return fit_tree(x, y, w, TreeParams{1, 1, 0.0});
}

void expect_recurrences(const DecisionTree& t) {
  for (const auto& n : t.nodes()) {
    EXPECT_GT(n.cover, 0.0);
    if (n.is_leaf()) continue;
    const auto& l = t.node(n.left);
    const auto& r = t.node(n.right);
    EXPECT_NEAR(n.cover, l.cover + r.cover, 1e-9 * n.cover);
    EXPECT_NEAR(n.value, (l.cover * l.value + r.cover * r.value) / n.cover,
                1e-9 * std::max({1.0, std::abs(l.value), std::abs(r.value)}));
  }
}

TEST(FitTree, ConstantTargetIsOneLeaf) {
  const Matrix x{{1, 2}, {3, 4}, {5, 6}};
  const std::vector<double> y(3, 3.7);
  const std::vector<double> w{1.0, 2.0, 0.5};
  const auto t = fit_tree(x, y, w, TreeParams{});
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.root().value, 3.7);
  EXPECT_EQ(t.root().cover, 3.5);
  EXPECT_EQ(predict_tree(t, std::vector<double>{100, -100}), 3.7);
}

TEST(FitTree, StumpSplitsAtMidpoint) {
  const auto t = stump();
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.root().feature, 0);
  EXPECT_EQ(t.root().threshold, 1.5);
  const auto& l = t.node(t.root().left);
  const auto& r = t.node(t.root().right);
  EXPECT_EQ(l.value, 0.0);
  EXPECT_EQ(l.cover, 2.0);
  EXPECT_EQ(r.value, 4.0);
  EXPECT_EQ(r.cover, 2.0);
}

TEST(FitTree, ZeroWeightRowIsIgnored) {
  const Matrix x{{0}, {1}, {2}, {3}, {1.2}};
  const std::vector<double> y{0, 0, 4, 4, 100};
  const std::vector<double> w{1, 1, 1, 1, 0};
  EXPECT_EQ(fit_tree(x, y, w, TreeParams{1, 1, 0.0}), stump());
}

TEST(PredictTree, RoutingBoundary) {
  const auto t = stump();
  EXPECT_EQ(predict_tree(t, std::vector<double>{0.5}), 0.0);
  EXPECT_EQ(predict_tree(t, std::vector<double>{1.5}), 0.0);
  EXPECT_EQ(predict_tree(t, std::vector<double>{1.5000001}), 4.0);
  EXPECT_THROW(predict_tree(t, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(FitTree, TieBreaksToLowestFeatureThenThreshold) {
  // Features 0 and 1 are identical, so every split ties across them.
  const Matrix x{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const std::vector<double> y{0, 1, 0, 1};
  const std::vector<double> w(4, 1.0);
  const auto t = fit_tree(x, y, w, TreeParams{1, 1, 0.0});
  ASSERT_FALSE(t.root().is_leaf());
  EXPECT_EQ(t.root().feature, 0);
  // Gains at 0.5 and 2.5 are equal (one row against three); the lower wins.
  EXPECT_EQ(t.root().threshold, 0.5);
}

TEST(FitTree, RespectsStoppingRules) {
  RandomStream rng(3);
  Matrix x(200, 3);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.gaussian();
    y[i] = x(i, 0) * x(i, 1) + rng.gaussian();
  }
  const std::vector<double> w(200, 1.0);
  for (int depth : {1, 3, 6}) {
    const auto t = fit_tree(x, y, w, TreeParams{depth, 7, 0.0});
    EXPECT_LE(t.depth(), depth);
    expect_recurrences(t);
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) EXPECT_GE(n.cover, 7.0);
    }
  }
  const auto heavy = fit_tree(x, y, w, TreeParams{10, 1, 0.2});
  for (const auto& n : heavy.nodes()) {
    if (n.is_leaf()) EXPECT_GE(n.cover, 0.2 * 200 - 1e-9);
  }
}

TEST(FitTree, IntegerWeightsEqualRepeatedRows) {
  RandomStream rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30;
    Matrix x(n, 3);
    std::vector<double> y(n);
    std::vector<double> w(n);
    Matrix xr(0, 3);
    std::vector<double> yr;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.gaussian();
      y[i] = rng.gaussian();
      w[i] = static_cast<double>(rng.uniform_index(4));
      for (int k = 0; k < static_cast<int>(w[i]); ++k) {
        xr.append_row(x.row(i));
        yr.push_back(y[i]);
      }
    }
    if (yr.empty()) continue;
    const TreeParams p{5, 1, 0.0};
    const auto a = fit_tree(x, y, w, p);
    const auto b = fit_tree(xr, yr, std::vector<double>(yr.size(), 1.0), p);
    ASSERT_EQ(a.nodes().size(), b.nodes().size());
    for (std::size_t k = 0; k < a.nodes().size(); ++k) {
      const auto& na = a.nodes()[k];
      const auto& nb = b.nodes()[k];
      EXPECT_EQ(na.feature, nb.feature);
      EXPECT_EQ(na.threshold, nb.threshold);
      EXPECT_EQ(na.left, nb.left);
      EXPECT_EQ(na.cover, nb.cover);
      EXPECT_NEAR(na.value, nb.value, 1e-12);
    }
  }
}

TEST(FitTree, GrownToPurityReproducesTargets) {
  RandomStream rng(4);
  Matrix x(60, 2);
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    x(i, 0) = rng.gaussian();
    x(i, 1) = rng.gaussian();
    y[i] = rng.gaussian();
  }
  const auto t = fit_tree(x, y, std::vector<double>(60, 1.0), TreeParams{30, 1, 0.0});
  for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(predict_tree(t, x.row(i)), y[i]);
}

TEST(FitTree, Errors) {
  const Matrix x{{0}, {1}};
  const std::vector<double> y{0, 1};
  EXPECT_THROW(fit_tree(x, y, std::vector<double>{0, 0}, TreeParams{}), InvalidArgument);
  EXPECT_THROW(fit_tree(x, y, std::vector<double>{1, -1}, TreeParams{}), InvalidArgument);
  EXPECT_THROW(fit_tree(x, std::vector<double>{0, NAN}, std::vector<double>{1, 1}, TreeParams{}),
               InvalidArgument);
  EXPECT_THROW(fit_tree(Matrix{{INFINITY}, {1}}, y, std::vector<double>{1, 1}, TreeParams{}),
               InvalidArgument);
  EXPECT_THROW(fit_tree(x, y, std::vector<double>{1}, TreeParams{}), InvalidArgument);
  EXPECT_THROW(fit_tree(x, y, std::vector<double>{1, 1}, TreeParams{0, 1, 0.0}), InvalidArgument);
  EXPECT_THROW(fit_tree(x, y, std::vector<double>{1, 1}, TreeParams{3, 0, 0.0}), InvalidArgument);
}

TEST(DecisionTree, ValidatesStructure) {
  // Cover of the root does not match its children.
  std::vector<TreeNode> bad{TreeNode{0, 0.0, 1, 2, 5.0, 1.0}, TreeNode::leaf(3.0, 0.0),
                            TreeNode::leaf(1.0, 4.0)};
  EXPECT_THROW(DecisionTree(bad, 1, TreeParams{}), InvalidArgument);
  bad[0].cover = 4.0;
  EXPECT_NO_THROW(DecisionTree(bad, 1, TreeParams{}));
  bad[0].value = 2.0;
  EXPECT_THROW(DecisionTree(bad, 1, TreeParams{}), InvalidArgument);
  bad[0].value = 1.0;
  EXPECT_THROW(DecisionTree(bad, 0, TreeParams{}), InvalidArgument);
  bad[0].right = 1;
  EXPECT_THROW(DecisionTree(bad, 1, TreeParams{}), InvalidArgument);
  EXPECT_THROW(DecisionTree({TreeNode::leaf(0.0, 1.0)}, 1, TreeParams{}), InvalidArgument);
  std::vector<TreeNode> deep{TreeNode::split(0, 0.0, 1, 2), TreeNode::leaf(1, 0),
                             TreeNode::leaf(1, 1)};
  EXPECT_THROW(DecisionTree::from_leaves(deep, 1, TreeParams{0, 1, 0.0}), InvalidArgument);
  const auto ok = DecisionTree::from_leaves(deep, 2, TreeParams{1, 1, 0.0});
  EXPECT_EQ(ok.root().value, 0.5);
  EXPECT_TRUE(ok.splits_on(0));
  EXPECT_FALSE(ok.splits_on(1));
  EXPECT_EQ(ok.num_leaves(), 2u);
  EXPECT_EQ(ok.depth(), 1);
}

}  // namespace
}  // namespace limase
