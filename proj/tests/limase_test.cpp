#include <gtest/gtest.h>

#include <cmath>

#include "limase/error.hpp"
#include "limase/forest.hpp"
#include "limase/limase.hpp"
#include "limase/synth.hpp"
#include "test_util.hpp"

namespace limase {
namespace {

class ConstantModel : public BlackBoxModel {
 public:
  ConstantModel(std::size_t d, double c) : d_(d), c_(c) {}
  ModelOutput predict(const Matrix& rows) const override {
    return ModelOutput(rows.rows(), 1, c_);
  }
  Task task() const override { return Task::regression(); }
  std::size_t num_features() const override { return d_; }

 private:
  std::size_t d_;
  double c_;
};

class FailingModel : public ConstantModel {
 public:
  using ConstantModel::ConstantModel;
  ModelOutput predict(const Matrix&) const override { throw ModelError("backend offline"); }
};

// Smooth regression surface over three features.
class SmoothModel : public BlackBoxModel {
 public:
  ModelOutput predict(const Matrix& rows) const override {
    ModelOutput out(rows.rows(), 1);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      out(i, 0) = std::sin(rows(i, 0)) + 0.5 * rows(i, 1) * rows(i, 1) + 0.1 * rows(i, 2);
    }
    return out;
  }
  Task task() const override { return Task::regression(); }
  std::size_t num_features() const override { return 3; }
};

std::vector<FeatureMeta> unit_features(std::size_t d) {
  std::vector<FeatureMeta> f(d);
  for (std::size_t j = 0; j < d; ++j) f[j] = FeatureMeta{"x" + std::to_string(j), j, 0.0, 1.0, -3.0, 3.0};
  return f;
}

DecisionTree stump_on_feature_zero(std::size_t d) {
  return DecisionTree::from_leaves(
      {TreeNode::split(0, 0.0, 1, 2), TreeNode::leaf(1.0, -1.0), TreeNode::leaf(1.0, 3.0)}, d,
      TreeParams{1, 1, 0.0});
}

TEST(SampleAround, Examples) {
  RandomStream rng(1);
  const auto f = unit_features(3);
  const std::vector<double> x{1, 2, 3};
  EXPECT_EQ(sample_around(x, f, 0, rng).rows(), 0u);
  auto constant = f;
  for (auto& m : constant) m.std = 0.0;
  const auto same = sample_around(x, constant, 5, rng);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(std::vector<double>(same.row(i).begin(), same.row(i).end()), x);
  }
  EXPECT_THROW(sample_around(std::vector<double>{1}, f, 3, rng), InvalidArgument);
}

TEST(SampleAround, Moments) {
  RandomStream rng(2);
  std::vector<FeatureMeta> f{{"a", 0, 0, 0.5, -1, 1}, {"b", 1, 0, 4.0, -9, 9}};
  const std::vector<double> x{10.0, -3.0};
  const auto z = sample_around(x, f, 100000, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto col = z.column(j);
    double mean = 0.0;
    for (double v : col) mean += v / col.size();
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean) / col.size();
    EXPECT_NEAR(mean, x[j], 0.02 * f[j].std);
    EXPECT_NEAR(std::sqrt(var), f[j].std, 0.03 * f[j].std);
  }
}

TEST(KernelWeight, Examples) {
  const auto f = unit_features(2);
  const std::vector<double> x{0.3, -0.2};
  EXPECT_EQ(kernel_weight(x, x, 0.7, f), 1.0);
  // Distance 2 in standardized units equals sigma = 2.
  EXPECT_NEAR(kernel_weight(x, std::vector<double>{2.3, -0.2}, 2.0, f), std::exp(-1.0), 1e-15);
  EXPECT_GE(kernel_weight(x, std::vector<double>{3.0, -3.0}, 1e9, f), 1.0 - 1e-9);
  double prev = 1.0;
  for (double dx = 0.1; dx < 5.0; dx += 0.1) {
    const double w = kernel_weight(x, std::vector<double>{0.3 + dx, -0.2}, 1.5, f);
    EXPECT_LT(w, prev);
    prev = w;
  }
}

TEST(Perturbations, AnchorRowFirst) {
  const auto f = unit_features(3);
  const std::vector<double> x{0.1, 0.2, 0.3};
  LimaseConfig c;
  c.n_samples = 50;
  const auto set = build_perturbations(ConstantModel(3, 2.0), x, f, c);
  ASSERT_EQ(set.z_x.rows(), 50u);
  EXPECT_EQ(set.z_y.size(), 50u);
  EXPECT_EQ(set.weights.size(), 50u);
  EXPECT_EQ(std::vector<double>(set.z_x.row(0).begin(), set.z_x.row(0).end()), x);
  EXPECT_EQ(set.weights[0], 1.0);
  for (double w : set.weights) {
    EXPECT_GT(w, 0.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(WeightedR2, Definition) {
  const std::vector<double> y{1, 2, 3, 4};
  const std::vector<double> w{1, 1, 2, 0};
  EXPECT_EQ(weighted_r2(y, y, w), 1.0);
  const std::vector<double> g{1, 2, 2, 100};
  // Weighted mean 2.25; residual 2 * 1; total 1.5625 + 0.0625 + 2 * 0.5625.
  EXPECT_NEAR(weighted_r2(g, y, w), 1.0 - 2.0 / 2.75, 1e-15);
  EXPECT_EQ(weighted_r2(std::vector<double>{1, 1}, std::vector<double>{1, 1},
                        std::vector<double>{1, 1}),
            1.0);
  EXPECT_EQ(weighted_r2(std::vector<double>{1, 2}, std::vector<double>{1, 1},
                        std::vector<double>{1, 1}),
            0.0);
  EXPECT_EQ(effective_sample_size(std::vector<double>{1, 0.5, 0.5}), 2.0);
}

TEST(LimaseExplain, ConstantModelIsDegenerate) {
  const auto f = unit_features(4);
  const auto r = limase_explain(ConstantModel(4, 7.5), std::vector<double>{0, 1, 2, 3}, f, {});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.explanation.phi, std::vector<double>(4, 0.0));
  EXPECT_DOUBLE_EQ(r.explanation.base_value, 7.5);
  EXPECT_DOUBLE_EQ(r.explanation.fx, 7.5);
  EXPECT_EQ(r.fidelity_r2, 1.0);
  EXPECT_EQ(r.surrogate.num_leaves(), 1u);
}

TEST(LimaseExplain, RecoversRepresentableStump) {
  const auto f = unit_features(4);
  const auto model = stump_on_feature_zero(4);
  LimaseConfig c;
  c.n_samples = 2000;
  c.tree_params.max_depth = 2;
  for (double x0 : {-0.4, 0.6}) {
    const auto r = limase_explain(model, std::vector<double>{x0, 0.2, -1.0, 0.5}, f, c);
    const auto& phi = r.explanation.phi;
    const auto top = std::max_element(phi.begin(), phi.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    });
    EXPECT_EQ(top - phi.begin(), 0);
    EXPECT_GE(r.fidelity_r2, 0.95);
    EXPECT_FALSE(r.degenerate);
  }
}

TEST(LimaseExplain, EfficiencyAgainstSurrogateAndMissingness) {
  const auto data = make_synthetic({300, 6, 4, 0.1, 0, 3});
  ForestParams p;
  p.n_trees = 10;
  RandomStream rng(4);
  const auto forest = fit_random_forest(data, p, rng);
  for (std::size_t i = 0; i < 10; ++i) {
    LimaseConfig c;
    c.seed = i;
    const auto r = limase_explain(forest, data.row(i), data.features(), c);
    const double gx = predict_tree(r.surrogate, data.row(i));
    EXPECT_EQ(r.explanation.fx, gx);
    EXPECT_LE(std::abs(r.explanation.base_value + r.explanation.phi_sum() - gx),
              1e-9 * std::max(1.0, std::abs(gx)));
    EXPECT_LE(r.fidelity_r2, 1.0);
    for (std::size_t j = 0; j < 6; ++j) {
      if (!r.surrogate.splits_on(j)) EXPECT_EQ(r.explanation.phi[j], 0.0);
    }
    EXPECT_EQ(r.explanation.explainer, "limase");
    EXPECT_EQ(r.sigma, kAutoSigma);
  }
}

TEST(LimaseExplain, ConstantFeatureGetsZero) {
  auto f = unit_features(3);
  f[1].std = 0.0;
  const SmoothModel m;
  const auto r = limase_explain(m, std::vector<double>{0.2, 1.0, -0.5}, f, {});
  EXPECT_FALSE(r.surrogate.splits_on(1));
  EXPECT_EQ(r.explanation.phi[1], 0.0);
}

TEST(LimaseExplain, Deterministic) {
  const auto f = unit_features(3);
  const SmoothModel m;
  LimaseConfig c;
  c.seed = 99;
  const std::vector<double> x{0.5, -0.5, 1.0};
  const auto a = limase_explain(m, x, f, c);
  const auto b = limase_explain(m, x, f, c);
  EXPECT_EQ(a.explanation.phi, b.explanation.phi);
  EXPECT_EQ(a.surrogate, b.surrogate);
  c.seed = 100;
  EXPECT_NE(limase_explain(m, x, f, c).explanation.phi, a.explanation.phi);
}

TEST(LimaseExplain, ClassificationTarget) {
  const auto data = make_synthetic({300, 5, 3, 0.1, 3, 8});
  ForestParams p;
  p.n_trees = 10;
  RandomStream rng(1);
  const auto forest = fit_random_forest(data, p, rng);
  const auto x = data.row(0);
  const auto r = limase_explain(forest, x, data.features(), {});
  ASSERT_TRUE(r.explanation.class_index.has_value());
  const auto probs = forest.predict(Matrix::from_rows({{x.begin(), x.end()}}));
  const auto best = static_cast<int>(std::max_element(probs.row(0).begin(), probs.row(0).end()) -
                                     probs.row(0).begin());
  EXPECT_EQ(*r.explanation.class_index, best);
  LimaseConfig c;
  c.class_index = 2;
  EXPECT_EQ(limase_explain(forest, x, data.features(), c).explanation.class_index, 2);
  c.class_index = 5;
  EXPECT_THROW(limase_explain(forest, x, data.features(), c), InvalidArgument);
}

TEST(LimaseExplain, Errors) {
  const auto f = unit_features(2);
  LimaseConfig c;
  c.n_samples = 9;
  EXPECT_THROW(limase_explain(ConstantModel(2, 1), std::vector<double>{0, 0}, f, c),
               InvalidArgument);
  c.n_samples = 100;
  c.sigma_mode = SigmaMode::kAbsolute;
  c.sigma = 0.0;
  EXPECT_THROW(limase_explain(ConstantModel(2, 1), std::vector<double>{0, 0}, f, c),
               InvalidArgument);
  try {
    limase_explain(FailingModel(2, 1), std::vector<double>{0, 0}, f, {});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("backend offline"), std::string::npos);
  }
  EXPECT_THROW(limase_explain(ConstantModel(3, 1), std::vector<double>{0, 0}, f, {}),
               InvalidArgument);
  EXPECT_THROW(limase_explain(ConstantModel(2, 1), std::vector<double>{0, NAN}, f, {}),
               InvalidArgument);
}

TEST(LimaseBatch, MatchesSingleCallsAndIsThreadIndependent) {
  const auto f = unit_features(3);
  const SmoothModel m;
  RandomStream rng(6);
  Matrix rows(6, 3);
  for (auto& v : rows.data()) v = rng.gaussian();
  LimaseConfig c;
  c.n_samples = 300;
  c.seed = 11;
  const auto serial = limase_explain_batch(m, rows, f, c, 1);
  const auto threaded = limase_explain_batch(m, rows, f, c, 3);
  ASSERT_EQ(serial.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    ASSERT_TRUE(serial[i].ok());
    EXPECT_EQ(serial[i].row, i);
    EXPECT_EQ(serial[i].result->explanation.phi, threaded[i].result->explanation.phi);
    LimaseConfig local = c;
    local.seed = derive_seed(c.seed, i);
    EXPECT_EQ(serial[i].result->explanation.phi,
              limase_explain(m, rows.row(i), f, local).explanation.phi);
  }
}

TEST(LimaseBatch, CollectsFailures) {
  const auto f = unit_features(2);
  const auto out = limase_explain_batch(FailingModel(2, 0), Matrix{{0, 0}, {1, 1}}, f, {}, 2);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& o : out) {
    EXPECT_FALSE(o.ok());
    EXPECT_NE(o.error.find("backend offline"), std::string::npos);
  }
}

TEST(SigmaSweep, SingleWidthMatchesExplain) {
  const auto f = unit_features(3);
  const SmoothModel m;
  const std::vector<double> x{0.1, 0.2, 0.3};
  LimaseConfig c;
  c.sigma_mode = SigmaMode::kAbsolute;
  c.sigma = 1.3;
  const std::vector<double> sigmas{1.3};
  const auto sweep = sigma_sweep(m, x, f, c, sigmas);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].second.explanation.phi, limase_explain(m, x, f, c).explanation.phi);
  EXPECT_THROW(sigma_sweep(m, x, f, c, std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(sigma_sweep(m, x, f, c, std::vector<double>{-1.0}), InvalidArgument);
}

TEST(SigmaSweep, TinyWidthConcentratesWeight) {
  const auto f = unit_features(3);
  const SmoothModel m;
  const std::vector<double> x{0.1, 0.2, 0.3};
  LimaseConfig c;
  c.n_samples = 500;
  c.sigma_mode = SigmaMode::kAbsolute;
  c.sigma = 0.01;
  const auto set = build_perturbations(m, x, f, c);
  // Only the anchor is a near-duplicate of x.
  EXPECT_LT(effective_sample_size(set.weights), 1.0 + 1e-6);
  c.sigma = 1e9;
  EXPECT_GT(effective_sample_size(build_perturbations(m, x, f, c).weights), 500.0 - 1e-3);
}

}  // namespace
}  // namespace limase
