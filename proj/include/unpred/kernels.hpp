#pragma once

#include <cstddef>

// Data-parallel inner loops of the detector. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. The variants are bit-identical: they perform the same IEEE
// operations per element in the same order (no FMA contraction).
//
// Multi-component sample blocks are component-major: component c of sample
// k lives at data[c * stride + k].

namespace unpred::kernels {

struct KernelTable {
  const char* name;

  /// out[k] = || a[., k] - b[., k] ||_2 for k < count.
  void (*pointwise_distance)(const double* a, const double* b, std::size_t dim, std::size_t stride,
                             std::size_t count, double* out);

  /// out[k] = || a[., k] ||_2 for k < count.
  void (*pointwise_norm)(const double* a, std::size_t dim, std::size_t stride, std::size_t count, double* out);

  /// max_k x[k]; -inf for count == 0. NaN inputs are not supported.
  double (*max_value)(const double* x, std::size_t count);

  /// out[k] = min(a[k], b[k]).
  void (*elementwise_min)(const double* a, const double* b, double* out, std::size_t count);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when the CPU or the build lacks AVX2.
const KernelTable* avx2_kernels();

/// Table used by the library: AVX2 when available unless the environment
/// variable UNPRED_KERNELS is set to "scalar".
const KernelTable& active_kernels();

/// Sliding-window minimum with radius w: out[k] = min x[k-w .. k+w] for
/// k in [w, count - w). Entries outside that range are left untouched.
/// Van Herk / Gil-Werman block scheme; the final merge uses
/// elementwise_min from `kt`.
void sliding_min(const KernelTable& kt, const double* x, std::size_t count, std::size_t w, double* out);

}  // namespace unpred::kernels
