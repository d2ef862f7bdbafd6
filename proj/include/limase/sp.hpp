#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "limase/dataset.hpp"
#include "limase/limase.hpp"
#include "limase/matrix.hpp"
#include "limase/model.hpp"

namespace limase {

// Row i holds the attribution vector of instance instance_ids[i].
struct ExplanationMatrix {
  Matrix values;
  std::vector<std::size_t> instance_ids;

  void validate() const;
};

// How signed attributions enter the importance sum and the coverage
// indicator. kAbsolute uses |S_ij| in both. kLiteral takes sqrt(sum S_ij)
// (negative sums clamp to 0) and counts a feature as covered only when some
// S_ij > 0.
enum class SignMode { kAbsolute, kLiteral };

struct SpResult {
  std::vector<std::size_t> selected;  // row indices into the matrix, greedy order
  std::vector<double> importance;
  std::vector<double> coverage_history;
  std::size_t budget = 0;
};

// I_j = sqrt(sum_i |S_ij|).
std::vector<double> feature_importance(const ExplanationMatrix& s,
                                       SignMode mode = SignMode::kAbsolute);

// Sum of I_j over features j touched by at least one selected row.
double coverage(std::span<const std::size_t> picked, const ExplanationMatrix& s,
                std::span<const double> importance, SignMode mode = SignMode::kAbsolute);

// Greedy budgeted maximization of coverage. Ties go to the lowest row index.
// Once no remaining row adds coverage, the lowest unselected indices fill the
// pick list up to min(budget, rows).
SpResult submodular_pick(const ExplanationMatrix& s, std::size_t budget,
                         SignMode mode = SignMode::kAbsolute);

struct SpExplainResult {
  SpResult pick;
  ExplanationMatrix matrix;
  std::vector<BatchOutcome> outcomes;
};

// Explains the chosen dataset rows with LIMASE and runs the pick on the
// resulting matrix. Any failed row aborts with the collected messages.
SpExplainResult sp_explain(const BlackBoxModel& model, const Dataset& data,
                           std::span<const std::size_t> sample_indices,
                           const LimaseConfig& config, std::size_t budget,
                           std::size_t threads = 1, SignMode mode = SignMode::kAbsolute);

// Assembles a matrix from a successful batch; throws listing failed rows.
ExplanationMatrix explanation_matrix(const std::vector<BatchOutcome>& outcomes,
                                     std::span<const std::size_t> instance_ids);

}  // namespace limase
