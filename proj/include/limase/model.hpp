#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "limase/dataset.hpp"
#include "limase/matrix.hpp"

namespace limase {

// n x k prediction matrix: k = 1 for regression, k = n_classes for
// classification (rows are probability vectors).
using ModelOutput = Matrix;

// The opaque function f being explained. Implementations must be pure:
// identical input batches produce identical outputs.
class BlackBoxModel {
 public:
  virtual ~BlackBoxModel() = default;

  virtual ModelOutput predict(const Matrix& rows) const = 0;
  virtual Task task() const = 0;
  virtual std::size_t num_features() const = 0;
};

// Throws ModelError unless `out` has the shape and probability structure the
// model's task promises for `n_rows` inputs.
void validate_output(const ModelOutput& out, std::size_t n_rows, const Task& task);

// Picks the scalar that gets explained: the regression value, or the
// probability of `class_index`. With no class given, the argmax class of the
// model's output for `anchor` is used.
class ScalarTarget {
 public:
  ScalarTarget(const BlackBoxModel& model, std::span<const double> anchor,
               std::optional<int> class_index);

  std::size_t column() const { return column_; }
  std::optional<int> class_index() const { return class_index_; }

  // One scalar per input row.
  std::vector<double> evaluate(const Matrix& rows) const;

 private:
  const BlackBoxModel* model_;
  std::size_t column_ = 0;
  std::optional<int> class_index_;
};

}  // namespace limase
