#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "limase/matrix.hpp"

namespace limase {

enum class TaskKind { kRegression, kClassification };

struct Task {
  TaskKind kind = TaskKind::kRegression;
  int n_classes = 0;  // only meaningful for classification

  static Task regression() { return {TaskKind::kRegression, 0}; }
  static Task classification(int n_classes) {
    return {TaskKind::kClassification, n_classes};
  }

  bool is_classification() const { return kind == TaskKind::kClassification; }
  // Width of a model output row: 1 for regression, n_classes otherwise.
  std::size_t output_width() const {
    return is_classification() ? static_cast<std::size_t>(n_classes) : 1;
  }
  bool operator==(const Task&) const = default;
};

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(const std::string& text);

// Per-column statistics. std is the population (divide-by-n) deviation.
struct FeatureMeta {
  std::string name;
  std::size_t index = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool operator==(const FeatureMeta&) const = default;
};

// Population statistics of each column of `rows`.
std::vector<FeatureMeta> compute_feature_meta(const Matrix& rows,
                                              const std::vector<std::string>& names);

// Immutable rectangular dataset. Construction validates every invariant:
// finite values, matching lengths, integral in-range class labels.
class Dataset {
 public:
  Dataset(std::vector<std::string> feature_names, Matrix rows,
          std::vector<double> target, Task task);

  std::size_t num_rows() const { return rows_.rows(); }
  std::size_t num_features() const { return features_.size(); }
  const std::vector<FeatureMeta>& features() const { return features_; }
  const Matrix& rows() const { return rows_; }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  const std::vector<double>& target() const { return target_; }
  const Task& task() const { return task_; }
  std::vector<std::string> feature_names() const;
  const std::string& target_name() const { return target_name_; }
  void set_target_name(std::string name) { target_name_ = std::move(name); }

  // Subset of rows, statistics recomputed.
  Dataset select(std::span<const std::size_t> indices) const;

 private:
  std::vector<FeatureMeta> features_;
  Matrix rows_;
  std::vector<double> target_;
  Task task_;
  std::string target_name_ = "target";
};

// Reads a header-first, comma-separated file. For classification the class
// count is max(label) + 1.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 TaskKind task);

// Writes features then the target column, values in shortest round-trip form.
void write_csv(const Dataset& data, const std::filesystem::path& path);

// (x_j - mean_j) / std_j; columns with std = 0 map to 0.
std::vector<double> standardize(std::span<const double> x,
                                std::span<const FeatureMeta> features);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

}  // namespace limase
