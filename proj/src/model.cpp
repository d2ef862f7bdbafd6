#include "limase/model.hpp"

#include <cmath>
#include <string>

#include "limase/error.hpp"

namespace limase {

void validate_output(const ModelOutput& out, std::size_t n_rows, const Task& task) {
  const auto k = task.output_width();
  if (out.rows() != n_rows || (n_rows > 0 && out.cols() != k)) {
    throw ModelError("model returned " + std::to_string(out.rows()) + "x" +
                     std::to_string(out.cols()) + " outputs, expected " +
                     std::to_string(n_rows) + "x" + std::to_string(k));
  }
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double sum = 0.0;
    for (double v : out.row(i)) {
      if (!std::isfinite(v)) {
        throw ModelError("model output row " + std::to_string(i) + " is not finite");
      }
      if (task.is_classification() && (v < 0.0 || v > 1.0)) {
        throw ModelError("model output row " + std::to_string(i) +
                         " has a probability outside [0, 1]");
      }
      sum += v;
    }
    if (task.is_classification() && std::abs(sum - 1.0) > 1e-6) {
      throw ModelError("model output row " + std::to_string(i) +
                       " does not sum to 1");
    }
  }
}

ScalarTarget::ScalarTarget(const BlackBoxModel& model, std::span<const double> anchor,
                           std::optional<int> class_index)
    : model_(&model) {
  const Task task = model.task();
  if (!task.is_classification()) {
    if (class_index) throw InvalidArgument("class index given for a regression model");
    return;
  }
  if (class_index) {
    if (*class_index < 0 || *class_index >= task.n_classes) {
      throw InvalidArgument("class index " + std::to_string(*class_index) +
                            " out of range for " + std::to_string(task.n_classes) +
                            " classes");
    }
    class_index_ = class_index;
  } else {
    Matrix probe(0, anchor.size());
    probe.append_row(anchor);
    const auto out = model.predict(probe);
    validate_output(out, 1, task);
    int best = 0;
    for (int c = 1; c < task.n_classes; ++c) {
      if (out(0, c) > out(0, best)) best = c;
    }
    class_index_ = best;
  }
  column_ = static_cast<std::size_t>(*class_index_);
}

std::vector<double> ScalarTarget::evaluate(const Matrix& rows) const {
  const auto out = model_->predict(rows);
  validate_output(out, rows.rows(), model_->task());
  std::vector<double> v(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) v[i] = out(i, column_);
  return v;
}

}  // namespace limase
