#include <cstdlib>
#include <string_view>

#include "eges/kernels.hpp"

namespace eges::kernels {

namespace detail {
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
const KernelTable& neon_table();
#endif
}  // namespace detail

const KernelTable* avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon() {
#if defined(__aarch64__) || defined(_M_ARM64)
  // Advanced SIMD is mandatory on AArch64.
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& selected = [] () -> const KernelTable& {
    const char* forced = std::getenv("EGES_KERNEL");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return scalar();
    }
    if (const KernelTable* t = avx2()) return *t;
    if (const KernelTable* t = neon()) return *t;
    return scalar();
  }();
  return selected;
}

}  // namespace eges::kernels
