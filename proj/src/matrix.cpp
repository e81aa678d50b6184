#include "ipman/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "ipman/errors.hpp"

namespace ipman {

Matrix2::Matrix2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix2::Matrix2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length does not match rows x cols");
  }
}

Matrix2 Matrix2::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix2 m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ShapeError("ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

void Matrix2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix2::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix2 Matrix2::gather_rows(std::span<const std::size_t> indices) const {
  Matrix2 out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw ShapeError("row index out of range");
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix2 Matrix2::head(std::size_t count) const {
  count = std::min(count, rows_);
  std::vector<double> d(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(count * cols_));
  return Matrix2(count, cols_, std::move(d));
}

Matrix2 Matrix2::vstack(const Matrix2& other) const {
  if (empty()) return other;
  if (other.empty()) return *this;
  if (other.cols_ != cols_) throw ShapeError("vstack column mismatch");
  std::vector<double> d = data_;
  d.insert(d.end(), other.data_.begin(), other.data_.end());
  return Matrix2(rows_ + other.rows_, cols_, std::move(d));
}

}  // namespace ipman
