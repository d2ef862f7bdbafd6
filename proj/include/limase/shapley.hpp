#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "limase/forest.hpp"
#include "limase/tree.hpp"

namespace limase {

// Attribution of one prediction: base_value + sum(phi) == fx.
struct ShapExplanation {
  std::string explainer;
  double base_value = 0.0;
  std::vector<double> phi;
  double fx = 0.0;
  std::vector<double> instance;
  std::optional<int> class_index;
  double elapsed_ms = 0.0;

  double phi_sum() const;
  // |base_value + sum(phi) - fx|.
  double efficiency_gap() const;
};

// Feature subset as a bitset over at most 32 features.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint32_t bits) : bits_(bits) {}

  static constexpr Coalition full(std::size_t d) {
    return Coalition(d >= 32 ? ~0u : ((1u << d) - 1u));
  }

  constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1u; }
  constexpr Coalition with(std::size_t i) const { return Coalition(bits_ | (1u << i)); }
  constexpr Coalition without(std::size_t i) const { return Coalition(bits_ & ~(1u << i)); }
  int size() const { return std::popcount(bits_); }
  constexpr std::uint32_t bits() const { return bits_; }

  constexpr bool operator==(const Coalition&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

using CoalitionValueFn = std::function<double(Coalition)>;

inline constexpr std::size_t kMaxBruteForceFeatures = 24;

// Path-dependent conditional expectation of the tree at x given the features
// in S: splits on features in S follow x, others average the children by
// cover.
double tree_conditional_value(const DecisionTree& tree, std::span<const double> x, Coalition s);

// Shapley values by enumerating all 2^d coalitions. The weight
// |s|!(d-|s|-1)!/d! equals 1/(d * C(d-1, |s|)) and is formed from that exact
// integer denominator.
std::vector<double> shapley_brute_force(const CoalitionValueFn& v, std::size_t d);

// Exact Shapley values of tree_conditional_value in O(leaves * depth^2).
ShapExplanation tree_shap(const DecisionTree& tree, std::span<const double> x);

// Mean of member tree_shap results for one output. For classification the
// explained quantity is the selected class's mean tree score before
// renormalization; with no class given the forest's argmax class at x is used.
ShapExplanation forest_shap(const ForestModel& forest, std::span<const double> x,
                            std::optional<int> class_index = std::nullopt);

}  // namespace limase
