#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "aqtc/tensor.hpp"

// Dense kernels used by the model. `serial` is the reference implementation;
// `omp` splits the outer loop across threads but keeps each output element's
// summation order identical to the reference, so both produce bit-equal
// results. The unqualified entry points dispatch to `omp` when the library is
// built with OpenMP.
namespace aqtc::kernels {

namespace serial {
// y = M x
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y);
// x += M^T g
void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x);
// M += g x^T
void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m);
// acc += v, elementwise
void axpy(double alpha, std::span<const double> v, std::span<double> acc);
}  // namespace serial

namespace omp {
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y);
void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x);
void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m);
void axpy(double alpha, std::span<const double> v, std::span<double> acc);
}  // namespace omp

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y);
void gemv_t_acc(const Matrix& m, std::span<const double> g, std::span<double> x);
void ger_acc(std::span<const double> g, std::span<const double> x, Matrix& m);
void axpy(double alpha, std::span<const double> v, std::span<double> acc);

// Runs body(i) for i in [0, n). Iterations must write disjoint state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

bool openmp_enabled() noexcept;
int max_threads() noexcept;

}  // namespace aqtc::kernels
