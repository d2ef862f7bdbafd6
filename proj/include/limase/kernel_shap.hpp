#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "limase/matrix.hpp"
#include "limase/model.hpp"
#include "limase/random.hpp"
#include "limase/shapley.hpp"

namespace limase {

inline constexpr std::size_t kMaxExactKernelFeatures = 16;
inline constexpr std::size_t kMaxKernelFeatures = 64;

struct KernelShapOptions {
  // Number of sampled coalitions; nullopt enumerates all 2^d (d <= 16).
  std::optional<std::size_t> budget;
  std::optional<int> class_index;
};

// Interventional value of coalition `mask` (bit j set = feature j taken from
// x): mean scalar output over background rows with the remaining features
// taken from the background row.
double interventional_value(const ScalarTarget& target, std::span<const double> x,
                            const Matrix& background, std::uint64_t mask);

// Shapley values as the solution of the Shapley-kernel weighted least squares
// problem over coalitions, with sum(phi) = f(x) - base imposed by eliminating
// the last coefficient. base_value is the mean output over the background.
//
// Sampled mode draws coalition sizes s with probability proportional to
// (d-1)/(s(d-s)), a uniform subset of that size, and always adds its
// complement. Each draw carries unit weight; duplicates are merged. A budget
// of at least 2^d - 2 falls back to exact enumeration.
ShapExplanation kernel_shap(const BlackBoxModel& model, std::span<const double> x,
                            const Matrix& background, const KernelShapOptions& options,
                            RandomStream& rng);

}  // namespace limase
