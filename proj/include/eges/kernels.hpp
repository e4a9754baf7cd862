#pragma once

#include <cstddef>
#include <string_view>

// Dense float kernels used by the training and scoring inner loops.
//
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64) are selected once at runtime. Results
// of the vectorized variants differ from the scalar reference only by
// floating-point reassociation, which the equivalence tests bound.

namespace eges::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i], float accumulation
  float (*dot)(const float* a, const float* b, std::size_t n);
  // sum_i a[i] * b[i], double accumulation
  double (*dot_wide)(const float* a, const float* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
};

const KernelTable& scalar();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2();
const KernelTable* neon();

// Best supported variant. Setting EGES_KERNEL=scalar in the environment
// forces the reference path.
const KernelTable& active();

}  // namespace eges::kernels
