#include <cmath>

#include "mlmc/simd/kernels.hpp"

namespace mlmc::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double gather_dot_scalar(const double* vals, const std::int32_t* idx, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += vals[k] * x[idx[k]];
  return s;
}

double l1_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::abs(a[k] - b[k]);
  return s;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k];
  return s;
}

double sqrt_product_sum_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::sqrt(a[k] * b[k]);
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,      dot_scalar,
                                 gather_dot_scalar, l1_distance_scalar,
                                 sum_scalar,        sqrt_product_sum_scalar,
                                 axpy_scalar};
  return table;
}

}  // namespace mlmc::simd
