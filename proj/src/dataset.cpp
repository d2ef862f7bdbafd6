#include "limase/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "limase/error.hpp"

namespace limase {

std::string to_string(TaskKind kind) {
  return kind == TaskKind::kClassification ? "classification" : "regression";
}

TaskKind parse_task_kind(const std::string& text) {
  if (text == "classification") return TaskKind::kClassification;
  if (text == "regression") return TaskKind::kRegression;
  throw InvalidArgument("unknown task kind '" + text +
                        "' (expected classification or regression)");
}

std::vector<FeatureMeta> compute_feature_meta(const Matrix& rows,
                                              const std::vector<std::string>& names) {
  if (names.size() != rows.cols()) {
    throw InvalidArgument("feature name count does not match column count");
  }
  std::vector<FeatureMeta> out(rows.cols());
  const auto n = rows.rows();
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    FeatureMeta& m = out[j];
    m.name = names[j];
    m.index = j;
    if (n == 0) continue;
    double sum = 0.0;
    m.min = rows(0, j);
    m.max = rows(0, j);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rows(i, j);
      sum += v;
      m.min = std::min(m.min, v);
      m.max = std::max(m.max, v);
    }
    m.mean = std::clamp(sum / static_cast<double>(n), m.min, m.max);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = rows(i, j) - m.mean;
      ss += dv * dv;
    }
    m.std = std::sqrt(ss / static_cast<double>(n));
  }
  return out;
}

Dataset::Dataset(std::vector<std::string> feature_names, Matrix rows,
                 std::vector<double> target, Task task)
    : rows_(std::move(rows)), target_(std::move(target)), task_(task) {
  if (rows_.rows() > 0 && rows_.cols() != feature_names.size()) {
    throw InvalidArgument("dataset has " + std::to_string(rows_.cols()) +
                          " columns but " + std::to_string(feature_names.size()) +
                          " feature names");
  }
  if (rows_.rows() == 0) rows_ = Matrix(0, feature_names.size());
  if (target_.size() != rows_.rows()) {
    throw InvalidArgument("target length does not match row count");
  }
  for (double v : rows_.data()) {
    if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
  }
  for (std::size_t i = 0; i < target_.size(); ++i) {
    const double t = target_[i];
    if (!std::isfinite(t)) throw DataError("target contains a non-finite value");
    if (task_.is_classification()) {
      if (task_.n_classes < 1) throw InvalidArgument("classification needs n_classes >= 1");
      if (t != std::floor(t) || t < 0 || t >= task_.n_classes) {
        throw DataError("row " + std::to_string(i) + ": class label " + format_double(t) +
                        " is not an integer in [0, " + std::to_string(task_.n_classes) +
                        ")");
      }
    }
  }
  features_ = compute_feature_meta(rows_, feature_names);
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(features_.size());
  for (const auto& f : features_) names.push_back(f.name);
  return names;
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Matrix sub(0, num_features());
  std::vector<double> t;
  t.reserve(indices.size());
  for (auto i : indices) {
    if (i >= num_rows()) throw InvalidArgument("row index out of range");
    sub.append_row(row(i));
    t.push_back(target_[i]);
  }
  Dataset out(feature_names(), std::move(sub), std::move(t), task_);
  out.target_name_ = target_name_;
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_real(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 TaskKind task) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw DataError(path.string() + ": empty file (no header row)");
  }
  auto header = split_line(line);
  for (auto& h : header) h = trim(h);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) {
    throw DataError(path.string() + ": target column '" + target_column + "' not found");
  }
  const auto target_idx = static_cast<std::size_t>(target_it - header.begin());
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_idx) names.push_back(header[c]);
  }

  Matrix rows(0, names.size());
  std::vector<double> target;
  std::vector<double> values(names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }
    std::size_t k = 0;
    double t = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto cell = trim(cells[c]);
      if (!parse_real(cell, v)) {
        throw DataError(path.string() + ": line " + std::to_string(line_no) +
                        ", column '" + header[c] + "': '" + cell +
                        "' is not a finite number");
      }
      if (c == target_idx) {
        t = v;
      } else {
        values[k++] = v;
      }
    }
    rows.append_row(values);
    target.push_back(t);
  }
  if (target.empty()) throw DataError(path.string() + ": no data rows");

  Task resolved = Task::regression();
  if (task == TaskKind::kClassification) {
    double max_label = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double t = target[i];
      if (t != std::floor(t) || t < 0) {
        throw DataError(path.string() + ": data row " + std::to_string(i + 1) +
                        ": class label " + format_double(t) +
                        " is not a non-negative integer");
      }
      max_label = std::max(max_label, t);
    }
    resolved = Task::classification(static_cast<int>(max_label) + 1);
  }
  Dataset out(std::move(names), std::move(rows), std::move(target), resolved);
  out.set_target_name(target_column);
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& f : data.features()) out << f.name << ',';
  out << data.target_name() << '\n';
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    for (double v : data.row(i)) out << format_double(v) << ',';
    out << format_double(data.target()[i]) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<double> standardize(std::span<const double> x,
                                std::span<const FeatureMeta> features) {
  if (x.size() != features.size()) {
    throw InvalidArgument("standardize: row has " + std::to_string(x.size()) +
                          " values, expected " + std::to_string(features.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& f = features[j];
    out[j] = f.std > 0.0 ? (x[j] - f.mean) / f.std : 0.0;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace limase
