#include "limase/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "limase/error.hpp"
#include "limase/random.hpp"

namespace limase {

Dataset make_synthetic(const SynthSpec& spec) {
  if (spec.rows == 0 || spec.features == 0) throw InvalidArgument("synthetic data needs rows and features");
  if (spec.informative > spec.features) throw InvalidArgument("more informative features than features");
  if (spec.n_classes == 1 || spec.n_classes < 0) throw InvalidArgument("n_classes must be 0 or >= 2");
  RandomStream rng(spec.seed);
  const auto n = spec.rows;
  const auto d = spec.features;
  Matrix x(n, d);
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) {
      z[j] = rng.gaussian();
      x(i, j) = static_cast<double>(j) + (1.0 + static_cast<double>(j % 3)) * z[j];
    }
    double s = 0.0;
    for (std::size_t j = 0; j < spec.informative; ++j) s += 3.0 * std::pow(0.7, j) * z[j];
    if (spec.informative >= 2) s += 0.5 * z[0] * z[1];
    if (spec.informative >= 3) s += std::sin(z[2]);
    score[i] = s + spec.noise * rng.gaussian();
  }

  std::vector<std::string> names(d);
  for (std::size_t j = 0; j < d; ++j) names[j] = "x" + std::to_string(j);

  if (spec.n_classes == 0) {
    Dataset out(std::move(names), std::move(x), std::move(score), Task::regression());
    out.set_target_name("y");
    return out;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  std::vector<double> label(n);
  const auto k = static_cast<std::size_t>(spec.n_classes);
  for (std::size_t r = 0; r < n; ++r) {
    label[order[r]] = static_cast<double>(std::min(k - 1, r * k / n));
  }
  Dataset out(std::move(names), std::move(x), std::move(label), Task::classification(spec.n_classes));
  out.set_target_name("label");
  return out;
}

}  // namespace limase
