#include "limase/limase.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "limase/error.hpp"
#include "limase/parallel.hpp"

namespace limase {

void LimaseConfig::validate() const {
  if (n_samples < 10) throw InvalidArgument("n_samples must be >= 10");
  if (sigma_mode == SigmaMode::kAbsolute && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw InvalidArgument("sigma must be a positive finite number");
  }
  tree_params.validate();
}

Matrix sample_around(std::span<const double> x, std::span<const FeatureMeta> features,
                     std::size_t n, RandomStream& rng) {
  if (x.size() != features.size()) {
    throw InvalidArgument("sample_around: row has " + std::to_string(x.size()) +
                          " values, expected " + std::to_string(features.size()));
  }
  Matrix out(n, x.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double g = rng.gaussian();
      row[j] = features[j].std > 0.0 ? x[j] + features[j].std * g : x[j];
    }
  }
  return out;
}

double kernel_weight(std::span<const double> x, std::span<const double> z, double sigma,
                     std::span<const FeatureMeta> features) {
  const auto sx = standardize(x, features);
  const auto sz = standardize(z, features);
  double d2 = 0.0;
  for (std::size_t j = 0; j < sx.size(); ++j) d2 += (sx[j] - sz[j]) * (sx[j] - sz[j]);
  return std::exp(-d2 / (sigma * sigma));
}

PerturbationSet build_perturbations(const BlackBoxModel& model, std::span<const double> x,
                                    std::span<const FeatureMeta> features,
                                    const LimaseConfig& config,
                                    std::optional<int>* resolved_class) {
  config.validate();
  if (x.size() != model.num_features() || x.size() != features.size()) {
    throw InvalidArgument("instance has " + std::to_string(x.size()) +
                          " features, model expects " + std::to_string(model.num_features()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("instance contains a non-finite value");
  }
  RandomStream rng(config.seed);
  PerturbationSet set;
  set.z_x = Matrix(0, x.size());
  set.z_x.append_row(x);
  const auto draws = sample_around(x, features, config.n_samples - 1, rng);
  for (std::size_t i = 0; i < draws.rows(); ++i) set.z_x.append_row(draws.row(i));

  const ScalarTarget target(model, x, config.class_index);
  if (resolved_class) *resolved_class = target.class_index();
  try {
    set.z_y = target.evaluate(set.z_x);
  } catch (const Error& err) {
    throw ModelError(std::string("prediction on the perturbation set failed: ") + err.what());
  }

  const double sigma = config.resolved_sigma();
  set.weights.resize(set.z_x.rows());
  for (std::size_t i = 0; i < set.z_x.rows(); ++i) {
    set.weights[i] = kernel_weight(x, set.z_x.row(i), sigma, features);
  }
  set.weights[0] = 1.0;
  return set;
}

double weighted_r2(std::span<const double> predicted, std::span<const double> actual,
                   std::span<const double> weights) {
  if (predicted.size() != actual.size() || actual.size() != weights.size()) {
    throw InvalidArgument("weighted_r2: length mismatch");
  }
  if (actual.empty()) throw InvalidArgument("weighted_r2: no samples");
  double wsum = 0.0;
  double wy = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    wsum += weights[i];
    wy += weights[i] * actual[i];
  }
  const auto [lo, hi] = std::minmax_element(actual.begin(), actual.end());
  if (*lo == *hi) {
    // A constant target: the weighted mean carries rounding noise, so compare
    // the fit directly.
    double worst = 0.0;
    for (double p : predicted) worst = std::max(worst, std::abs(p - *lo));
    return worst <= 1e-12 * std::max(1.0, std::abs(*lo)) ? 1.0 : 0.0;
  }
  const double mean = wy / wsum;
  double resid = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    resid += weights[i] * (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    total += weights[i] * (actual[i] - mean) * (actual[i] - mean);
  }
  if (total <= 0.0) return resid <= 0.0 ? 1.0 : 0.0;
  return 1.0 - resid / total;
}

double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0;
  double top = 0.0;
  for (double w : weights) {
    sum += w;
    top = std::max(top, w);
  }
  return top > 0.0 ? sum / top : 0.0;
}

LimaseResult limase_explain(const BlackBoxModel& model, std::span<const double> x,
                            std::span<const FeatureMeta> features, const LimaseConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<int> resolved_class;
  const auto set = build_perturbations(model, x, features, config, &resolved_class);
  auto surrogate = fit_tree(set.z_x, set.z_y, set.weights, config.tree_params);

  auto explanation = tree_shap(surrogate, x);
  explanation.explainer = "limase";
  explanation.class_index = resolved_class;

  std::vector<double> fitted(set.z_x.rows());
  for (std::size_t i = 0; i < fitted.size(); ++i) fitted[i] = surrogate.predict_one(set.z_x.row(i));

  LimaseResult result{std::move(explanation), std::move(surrogate), 0.0, false,
                      config.resolved_sigma(), config};
  result.fidelity_r2 = weighted_r2(fitted, set.z_y, set.weights);
  result.degenerate = result.surrogate.num_leaves() == 1;
  result.config.class_index = resolved_class;
  result.explanation.elapsed_ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - start)
                                      .count();
  return result;
}

std::vector<BatchOutcome> limase_explain_batch(const BlackBoxModel& model, const Matrix& rows,
                                               std::span<const FeatureMeta> features,
                                               const LimaseConfig& config,
                                               std::size_t threads) {
  config.validate();
  std::vector<BatchOutcome> out(rows.rows());
  parallel_for(rows.rows(), threads, [&](std::size_t i) {
    out[i].row = i;
    LimaseConfig local = config;
    local.seed = derive_seed(config.seed, i);
    try {
      out[i].result = limase_explain(model, rows.row(i), features, local);
    } catch (const std::exception& err) {
      out[i].error = err.what();
    }
  });
  return out;
}

std::vector<std::pair<double, LimaseResult>> sigma_sweep(const BlackBoxModel& model,
                                                         std::span<const double> x,
                                                         std::span<const FeatureMeta> features,
                                                         const LimaseConfig& config,
                                                         std::span<const double> sigmas) {
  if (sigmas.empty()) throw InvalidArgument("sigma_sweep: no kernel widths given");
  std::vector<std::pair<double, LimaseResult>> out;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw InvalidArgument("sigma_sweep: kernel widths must be positive");
    LimaseConfig local = config;
    local.sigma = s;
    local.sigma_mode = SigmaMode::kAbsolute;
    out.emplace_back(s, limase_explain(model, x, features, local));
  }
  return out;
}

}  // namespace limase
