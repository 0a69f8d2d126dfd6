#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sks/exec.hpp"

namespace sks {

/// Dense row-major simplex tableau. The last row holds the reduced costs
/// and the last column the right-hand sides.
class Tableau {
 public:
  Tableau() = default;
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {a_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {a_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return a_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Gauss-Jordan pivot on (row, col): scales the pivot row to a unit entry and
/// eliminates the column from every other row, objective row included.
void pivot(Tableau& t, std::size_t row, std::size_t col, ExecPolicy policy);

}  // namespace sks
