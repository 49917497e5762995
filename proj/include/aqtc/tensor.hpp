#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aqtc {

// Row-major dense matrix of doubles. Vectors are 1-column matrices or plain
// std::vector<double>.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const noexcept { return data.size(); }
  void set_zero();

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace aqtc
