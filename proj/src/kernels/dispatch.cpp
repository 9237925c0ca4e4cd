#include <cstdlib>
#include <string_view>

#include "solbound/kernels.hpp"

namespace solbound::kernels {

#if defined(SOLBOUND_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(SOLBOUND_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("SOLBOUND_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
    const KernelTable* simd = avx2_kernels();
    return simd != nullptr ? simd : &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace solbound::kernels
