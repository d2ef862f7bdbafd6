#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "limase/dataset.hpp"
#include "limase/model.hpp"
#include "limase/random.hpp"
#include "limase/shapley.hpp"
#include "limase/tree.hpp"

namespace limase {

enum class SigmaMode { kAbsolute, kAuto };

// Kernel width used in auto mode, in standardized distance units: five
// standard deviations per dimension, and every standardized dimension has
// unit deviation.
inline constexpr double kAutoSigma = 5.0;

struct LimaseConfig {
  std::size_t n_samples = 1000;
  double sigma = kAutoSigma;
  SigmaMode sigma_mode = SigmaMode::kAuto;
  TreeParams tree_params{6, 5, 0.0};
  std::uint64_t seed = 0;
  std::optional<int> class_index;

  void validate() const;
  double resolved_sigma() const { return sigma_mode == SigmaMode::kAuto ? kAutoSigma : sigma; }
};

// The weighted training set of the surrogate. Row 0 is always the anchor x
// with weight 1.
struct PerturbationSet {
  Matrix z_x;
  std::vector<double> z_y;
  std::vector<double> weights;
};

struct LimaseResult {
  ShapExplanation explanation;  // efficiency holds against surrogate(x)
  DecisionTree surrogate;
  double fidelity_r2 = 0.0;
  // Surrogate is a single leaf, so every attribution is zero.
  bool degenerate = false;
  double sigma = 0.0;  // resolved kernel width
  LimaseConfig config;
};

// n rows of x_j + std_j * N(0, 1). Features with zero deviation stay at x_j.
Matrix sample_around(std::span<const double> x, std::span<const FeatureMeta> features,
                     std::size_t n, RandomStream& rng);

// exp(-d^2 / sigma^2), d the Euclidean distance in standardized space.
double kernel_weight(std::span<const double> x, std::span<const double> z, double sigma,
                     std::span<const FeatureMeta> features);

// Anchor plus n_samples - 1 perturbations, their scalar model outputs and
// kernel weights.
PerturbationSet build_perturbations(const BlackBoxModel& model, std::span<const double> x,
                                    std::span<const FeatureMeta> features,
                                    const LimaseConfig& config,
                                    std::optional<int>* resolved_class = nullptr);

// 1 - sum w (g - f)^2 / sum w (f - mean_w f)^2. A constant target gives 1 if
// it is matched exactly and 0 otherwise.
double weighted_r2(std::span<const double> predicted, std::span<const double> actual,
                   std::span<const double> weights);

// sum(w) / max(w).
double effective_sample_size(std::span<const double> weights);

LimaseResult limase_explain(const BlackBoxModel& model, std::span<const double> x,
                            std::span<const FeatureMeta> features, const LimaseConfig& config);

struct BatchOutcome {
  std::size_t row = 0;
  std::optional<LimaseResult> result;
  std::string error;  // set when result is empty

  bool ok() const { return result.has_value(); }
};

// Explains every row with seed derive_seed(config.seed, row). Failures are
// recorded per row and do not stop the batch.
std::vector<BatchOutcome> limase_explain_batch(const BlackBoxModel& model, const Matrix& rows,
                                               std::span<const FeatureMeta> features,
                                               const LimaseConfig& config,
                                               std::size_t threads = 1);

// One explanation per kernel width, all sharing the perturbation geometry of
// config.seed.
std::vector<std::pair<double, LimaseResult>> sigma_sweep(const BlackBoxModel& model,
                                                         std::span<const double> x,
                                                         std::span<const FeatureMeta> features,
                                                         const LimaseConfig& config,
                                                         std::span<const double> sigmas);

}  // namespace limase
