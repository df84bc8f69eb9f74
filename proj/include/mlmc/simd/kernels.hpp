#pragma once

// Data-parallel inner loops shared by the matrix, density and walk code.
//
// Every kernel has a scalar reference implementation. Vector variants are
// compiled in separate translation units with their own target flags and
// picked at runtime from the CPU feature set; MLMC_SIMD=scalar|avx2|auto
// forces a choice. The choice is made once per process, so results within a
// process never mix variants.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mlmc::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_k vals[k] * x[idx[k]]
  double (*gather_dot)(const double* vals, const std::int32_t* idx, const double* x, std::size_t n);
  // sum_k |a[k] - b[k]|
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  // sum_k sqrt(a[k] * b[k]); inputs must be nonnegative
  double (*sqrt_product_sum)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();

/// Table used by the library.
const KernelTable& active();

/// Pins the active table; throws if the requested variant is unavailable.
void select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double gather_dot(std::span<const double> vals, std::span<const std::int32_t> idx,
                         std::span<const double> x) {
  return active().gather_dot(vals.data(), idx.data(), x.data(), vals.size());
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  return active().l1_distance(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

inline double sqrt_product_sum(std::span<const double> a, std::span<const double> b) {
  return active().sqrt_product_sum(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace mlmc::simd
