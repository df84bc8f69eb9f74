#include <atomic>
#include <cstdlib>
#include <string>

#include "mlmc/error.hpp"
#include "mlmc/simd/kernels.hpp"

namespace mlmc::simd {

#ifdef MLMC_HAVE_AVX2_TU
const KernelTable& avx2_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MLMC_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("MLMC_SIMD");
  const std::string want = env != nullptr ? env : "auto";
  if (want == "scalar") return &scalar_table();
  if (const KernelTable* t = avx2_table(); t != nullptr) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_table() {
#ifdef MLMC_HAVE_AVX2_TU
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const KernelTable* init = initial_table();
    const KernelTable* expected = nullptr;
    g_active.compare_exchange_strong(expected, init);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

void select(Isa isa) {
  if (isa == Isa::scalar) {
    g_active.store(&scalar_table());
    return;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr) fail(ErrorCode::invalid_parameter, "avx2 kernels unavailable on this build or CPU");
  g_active.store(t);
}

}  // namespace mlmc::simd
