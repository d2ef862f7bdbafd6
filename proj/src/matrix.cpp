#include "limase/matrix.hpp"

#include <string>

namespace limase {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
  for (const auto& r : init) {
    append_row(std::vector<double>(r));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw InvalidArgument("row has " + std::to_string(values.size()) +
                          " values, matrix has " + std::to_string(cols_) +
                          " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto v = row(r);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

}  // namespace limase
