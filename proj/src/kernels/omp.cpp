#include <cassert>
#include <cstdint>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aqtc/kernels.hpp"

namespace aqtc::kernels {

namespace {
// Below this many multiply-adds the fork/join costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;
}  // namespace

namespace omp {

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(x.size() == m.cols && y.size() == m.rows);
  const auto rows = static_cast<std::int64_t>(m.rows);
#pragma omp parallel for schedule(static) if (m.size() >= kParallelWork)
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* row = m.data.data() + r * m.cols;
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) sum += row[c] * x[c];
    y[r] = sum;
  }
}

void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x) {
  assert(g.size() == m.rows && x.size() == m.cols);
  const auto cols = static_cast<std::int64_t>(m.cols);
#pragma omp parallel for schedule(static) if (m.size() >= kParallelWork)
  for (std::int64_t c = 0; c < cols; ++c) {
    double sum = x[c];
    for (std::size_t r = 0; r < m.rows; ++r) sum += m.data[r * m.cols + c] * g[r];
    x[c] = sum;
  }
}

void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m) {
  assert(g.size() == m.rows && x.size() == m.cols);
  const auto rows = static_cast<std::int64_t>(m.rows);
#pragma omp parallel for schedule(static) if (m.size() >= kParallelWork)
  for (std::int64_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) row[c] += gr * x[c];
  }
}

void axpy(double alpha, std::span<const double> v, std::span<double> acc) {
  assert(v.size() == acc.size());
  const auto n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static) if (v.size() >= kParallelWork)
  for (std::int64_t i = 0; i < n; ++i) acc[i] += alpha * v[i];
}

}  // namespace omp

#ifdef _OPENMP
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) { omp::gemv(m, x, y); }
void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x) {
  omp::gemv_t_acc(m, g, x);
}
void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m) {
  omp::ger_acc(g, x, m);
}
void axpy(double alpha, std::span<const double> v, std::span<double> acc) {
  omp::axpy(alpha, v, acc);
}
#else
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) { serial::gemv(m, x, y); }
void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x) {
  serial::gemv_t_acc(m, g, x);
}
void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m) {
  serial::ger_acc(g, x, m);
}
void axpy(double alpha, std::span<const double> v, std::span<double> acc) {
  serial::axpy(alpha, v, acc);
}
#endif

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  // Exceptions cannot cross the parallel region; the lowest failing index wins.
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool openmp_enabled() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace aqtc::kernels
