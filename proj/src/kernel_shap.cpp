#include "limase/kernel_shap.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "limase/error.hpp"

namespace limase {

namespace {

struct WeightedCoalition {
  std::uint64_t mask;
  double weight;
};

double binomial_real(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

std::vector<WeightedCoalition> enumerate_coalitions(std::size_t d) {
  std::vector<WeightedCoalition> out;
  const std::uint64_t full = (std::uint64_t{1} << d) - 1;
  for (std::uint64_t m = 1; m < full; ++m) {
    const auto s = static_cast<std::size_t>(std::popcount(m));
    const double w = static_cast<double>(d - 1) /
                     (binomial_real(d, s) * static_cast<double>(s) * static_cast<double>(d - s));
    out.push_back({m, w});
  }
  return out;
}

std::vector<WeightedCoalition> sample_coalitions(std::size_t d, std::size_t budget,
                                                 RandomStream& rng) {
  std::vector<double> cdf(d - 1);
  double total = 0.0;
  for (std::size_t s = 1; s < d; ++s) {
    total += static_cast<double>(d - 1) / (static_cast<double>(s) * static_cast<double>(d - s));
    cdf[s - 1] = total;
  }
  const std::uint64_t full = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  std::map<std::uint64_t, double> merged;
  std::vector<std::size_t> perm(d);
  for (std::size_t pair = 0; pair < budget / 2; ++pair) {
    const double u = rng.uniform() * total;
    const auto s = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                            cdf.begin()) + 1;
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < std::min(s, d - 1); ++i) {
      const auto j = i + rng.uniform_index(d - i);
      std::swap(perm[i], perm[j]);
      mask |= std::uint64_t{1} << perm[i];
    }
    merged[mask] += 1.0;
    merged[full & ~mask] += 1.0;
  }
  std::vector<WeightedCoalition> out;
  out.reserve(merged.size());
  for (const auto& [m, w] : merged) out.push_back({m, w});
  return out;
}

std::vector<double> mean_values(const ScalarTarget& target, std::span<const double> x,
                                const Matrix& background,
                                const std::vector<WeightedCoalition>& coalitions) {
  const auto d = x.size();
  const auto nb = background.rows();
  const std::size_t chunk = std::max<std::size_t>(1, 65536 / nb);
  std::vector<double> values(coalitions.size());
  Matrix batch(0, d);
  for (std::size_t start = 0; start < coalitions.size(); start += chunk) {
    const auto stop = std::min(coalitions.size(), start + chunk);
    batch = Matrix((stop - start) * nb, d);
    for (std::size_t c = start; c < stop; ++c) {
      const auto mask = coalitions[c].mask;
      for (std::size_t b = 0; b < nb; ++b) {
        auto row = batch.row((c - start) * nb + b);
        const auto bg = background.row(b);
        for (std::size_t j = 0; j < d; ++j) row[j] = (mask >> j) & 1u ? x[j] : bg[j];
      }
    }
    const auto out = target.evaluate(batch);
    for (std::size_t c = start; c < stop; ++c) {
      double sum = 0.0;
      for (std::size_t b = 0; b < nb; ++b) sum += out[(c - start) * nb + b];
      values[c] = sum / static_cast<double>(nb);
    }
  }
  return values;
}

}  // namespace

double interventional_value(const ScalarTarget& target, std::span<const double> x,
                            const Matrix& background, std::uint64_t mask) {
  return mean_values(target, x, background, {{mask, 1.0}}).front();
}

ShapExplanation kernel_shap(const BlackBoxModel& model, std::span<const double> x,
                            const Matrix& background, const KernelShapOptions& options,
                            RandomStream& rng) {
  const auto start = std::chrono::steady_clock::now();
  const auto d = x.size();
  if (d != model.num_features()) {
    throw InvalidArgument("kernel_shap: instance has " + std::to_string(d) +
                          " features, model expects " + std::to_string(model.num_features()));
  }
  if (background.rows() == 0) throw InvalidArgument("kernel_shap: empty background");
  if (background.cols() != d) throw InvalidArgument("kernel_shap: background width mismatch");
  if (d > kMaxKernelFeatures) {
    throw InvalidArgument("kernel_shap supports at most " + std::to_string(kMaxKernelFeatures) +
                          " features");
  }
  bool exact = !options.budget.has_value();
  if (exact && d > kMaxExactKernelFeatures) {
    throw InvalidArgument("kernel_shap exact mode supports at most " +
                          std::to_string(kMaxExactKernelFeatures) + " features, got " +
                          std::to_string(d));
  }
  if (!exact) {
    const auto budget = *options.budget;
    if (budget < 2 * d + 2) {
      throw InvalidArgument("kernel_shap budget " + std::to_string(budget) +
                            " is below the minimum 2d+2 = " + std::to_string(2 * d + 2));
    }
    if (d <= kMaxExactKernelFeatures &&
        static_cast<double>(budget) >= std::ldexp(1.0, static_cast<int>(d)) - 2.0) {
      exact = true;
    }
  }

  const ScalarTarget target(model, x, options.class_index);
  ShapExplanation e;
  e.explainer = "kernelshap";
  e.instance.assign(x.begin(), x.end());
  e.class_index = target.class_index();
  e.phi.assign(d, 0.0);

  const auto bg_out = target.evaluate(background);
  e.base_value = std::accumulate(bg_out.begin(), bg_out.end(), 0.0) /
                 static_cast<double>(bg_out.size());
  Matrix anchor(0, d);
  anchor.append_row(x);
  e.fx = target.evaluate(anchor).front();
  const double total = e.fx - e.base_value;

  if (d == 1) {
    e.phi[0] = total;
  } else if (d > 1) {
    const auto coalitions = exact ? enumerate_coalitions(d)
                                  : sample_coalitions(d, *options.budget, rng);
    const auto values = mean_values(target, x, background, coalitions);
    const auto m = static_cast<Eigen::Index>(coalitions.size());
    const auto p = static_cast<Eigen::Index>(d - 1);
    Eigen::MatrixXd design(m, p);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto mask = coalitions[static_cast<std::size_t>(r)].mask;
      const double sw = std::sqrt(coalitions[static_cast<std::size_t>(r)].weight);
      const double z_last = static_cast<double>((mask >> (d - 1)) & 1u);
      for (Eigen::Index j = 0; j < p; ++j) {
        design(r, j) = sw * (static_cast<double>((mask >> j) & 1u) - z_last);
      }
      rhs(r) = sw * (values[static_cast<std::size_t>(r)] - e.base_value - z_last * total);
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(rhs);
    double partial = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      e.phi[static_cast<std::size_t>(j)] = beta(j);
      partial += beta(j);
    }
    e.phi[d - 1] = total - partial;
  }
  e.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return e;
}

}  // namespace limase
