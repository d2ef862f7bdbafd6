#include "limase/sp.hpp"

#include <cmath>
#include <string>

#include "limase/error.hpp"

namespace limase {

void ExplanationMatrix::validate() const {
  if (values.rows() == 0 || values.cols() == 0) {
    throw InvalidArgument("explanation matrix is empty");
  }
  if (instance_ids.size() != values.rows()) {
    throw InvalidArgument("explanation matrix ids do not match its rows");
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("explanation matrix has a non-finite entry");
  }
}

namespace {

bool touches(double v, SignMode mode) {
  return mode == SignMode::kAbsolute ? v != 0.0 : v > 0.0;
}

}  // namespace

std::vector<double> feature_importance(const ExplanationMatrix& s, SignMode mode) {
  s.validate();
  const auto& m = s.values;
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      sum += mode == SignMode::kAbsolute ? std::abs(m(i, j)) : m(i, j);
    }
    out[j] = std::sqrt(std::max(sum, 0.0));
  }
  return out;
}

double coverage(std::span<const std::size_t> picked, const ExplanationMatrix& s,
                std::span<const double> importance, SignMode mode) {
  const auto& m = s.values;
  if (importance.size() != m.cols()) throw InvalidArgument("importance length mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    bool covered = false;
    for (auto i : picked) {
      if (i >= m.rows()) {
        throw InvalidArgument("instance index " + std::to_string(i) + " out of range");
      }
      if (touches(m(i, j), mode)) {
        covered = true;
        break;
      }
    }
    if (covered) total += importance[j];
  }
  return total;
}

SpResult submodular_pick(const ExplanationMatrix& s, std::size_t budget, SignMode mode) {
  s.validate();
  if (budget < 1) throw InvalidArgument("submodular_pick: budget must be >= 1");
  const auto& m = s.values;
  const auto n = m.rows();
  const auto d = m.cols();
  SpResult result;
  result.budget = budget;
  result.importance = feature_importance(s, mode);
  const auto target = std::min(budget, n);

  std::vector<char> covered(d, 0);
  std::vector<char> taken(n, 0);
  double current = 0.0;
  while (result.selected.size() < target) {
    std::size_t best = n;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (!covered[j] && touches(m(i, j), mode)) gain += result.importance[j];
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == n) break;
    taken[best] = 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (touches(m(best, j), mode)) covered[j] = 1;
    }
    result.selected.push_back(best);
    current = coverage(result.selected, s, result.importance, mode);
    result.coverage_history.push_back(current);
  }
  for (std::size_t i = 0; i < n && result.selected.size() < target; ++i) {
    if (taken[i]) continue;
    taken[i] = 1;
    result.selected.push_back(i);
    result.coverage_history.push_back(current);
  }
  return result;
}

ExplanationMatrix explanation_matrix(const std::vector<BatchOutcome>& outcomes,
                                     std::span<const std::size_t> instance_ids) {
  if (outcomes.size() != instance_ids.size()) {
    throw InvalidArgument("explanation_matrix: outcome and id counts differ");
  }
  std::string failures;
  for (const auto& o : outcomes) {
    if (!o.ok()) failures += "\n  instance " + std::to_string(instance_ids[o.row]) + ": " + o.error;
  }
  if (!failures.empty()) throw ModelError("explanations failed:" + failures);
  ExplanationMatrix out;
  out.instance_ids.assign(instance_ids.begin(), instance_ids.end());
  for (const auto& o : outcomes) out.values.append_row(o.result->explanation.phi);
  return out;
}

SpExplainResult sp_explain(const BlackBoxModel& model, const Dataset& data,
                           std::span<const std::size_t> sample_indices,
                           const LimaseConfig& config, std::size_t budget, std::size_t threads,
                           SignMode mode) {
  Matrix rows(0, data.num_features());
  for (auto i : sample_indices) {
    if (i >= data.num_rows()) {
      throw InvalidArgument("sample index " + std::to_string(i) + " out of range");
    }
    rows.append_row(data.row(i));
  }
  auto outcomes = limase_explain_batch(model, rows, data.features(), config, threads);
  auto matrix = explanation_matrix(outcomes, sample_indices);
  auto pick = submodular_pick(matrix, budget, mode);
  return {std::move(pick), std::move(matrix), std::move(outcomes)};
}

}  // namespace limase
