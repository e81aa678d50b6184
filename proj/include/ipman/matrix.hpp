#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ipman {

// Dense row-major matrix of doubles. Rows are points of a batch.
class Matrix2 {
 public:
  Matrix2() = default;
  Matrix2(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix2(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix2 from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  void fill(double v);
  bool all_finite() const noexcept;

  // Selects the given rows, in order.
  Matrix2 gather_rows(std::span<const std::size_t> indices) const;
  // Copies the leading `count` rows.
  Matrix2 head(std::size_t count) const;
  // Stacks `other` below this matrix.
  Matrix2 vstack(const Matrix2& other) const;

  bool operator==(const Matrix2&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace ipman
