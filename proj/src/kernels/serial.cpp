#include <cassert>

#include "aqtc/kernels.hpp"

namespace aqtc::kernels::serial {

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(x.size() == m.cols && y.size() == m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.data.data() + r * m.cols;
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) sum += row[c] * x[c];
    y[r] = sum;
  }
}

void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x) {
  assert(g.size() == m.rows && x.size() == m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double sum = x[c];
    for (std::size_t r = 0; r < m.rows; ++r) sum += m.data[r * m.cols + c] * g[r];
    x[c] = sum;
  }
}

void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m) {
  assert(g.size() == m.rows && x.size() == m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) row[c] += gr * x[c];
  }
}

void axpy(double alpha, std::span<const double> v, std::span<double> acc) {
  assert(v.size() == acc.size());
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += alpha * v[i];
}

}  // namespace aqtc::kernels::serial
