#pragma once

#include <cstddef>
#include <type_traits>

#include "eges/kernels.hpp"

// Precision-generic vector primitives: float goes through the dispatched
// SIMD kernels, double uses plain loops.
namespace eges::detail {

template <class T>
inline T dot(const T* a, const T* b, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    return kernels::active().dot(a, b, n);
  } else {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
  }
}

template <class T>
inline void axpy(T alpha, const T* x, T* y, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    kernels::active().axpy(alpha, x, y, n);
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
  }
}

}  // namespace eges::detail
