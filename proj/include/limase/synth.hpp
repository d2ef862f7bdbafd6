#pragma once

#include <cstddef>
#include <cstdint>

#include "limase/dataset.hpp"

namespace limase {

// Synthetic tabular data with a known importance ranking.
//
// Feature j is N(0, 1) scaled by (1 + j % 3) and shifted by j. Only the first
// n_informative features drive the latent score
//   s = sum_j c_j z_j + 0.5 z_0 z_1 + sin(z_2),  c_j = 3 * 0.7^j,
// with z_j the unit-scale draw. Regression targets are s plus N(0, noise^2);
// classification labels bin the noisy score into n_classes equal-count
// classes.
struct SynthSpec {
  std::size_t rows = 500;
  std::size_t features = 8;
  std::size_t informative = 5;
  double noise = 0.1;
  int n_classes = 0;  // 0 means regression
  std::uint64_t seed = 0;
};

Dataset make_synthetic(const SynthSpec& spec);

}  // namespace limase
