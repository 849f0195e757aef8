// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "unpred/kernels.hpp"

namespace unpred::kernels {

namespace {

void distance_avx2(const double* a, const double* b, std::size_t dim, std::size_t stride, std::size_t count,
                   double* out) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d s = _mm256_setzero_pd();
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + c * stride + k), _mm256_loadu_pd(b + c * stride + k));
      s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + k, _mm256_sqrt_pd(s));
  }
  for (; k < count; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = a[c * stride + k] - b[c * stride + k];
      s = s + d * d;
    }
    out[k] = std::sqrt(s);
  }
}

void norm_avx2(const double* a, std::size_t dim, std::size_t stride, std::size_t count, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d s = _mm256_setzero_pd();
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d v = _mm256_loadu_pd(a + c * stride + k);
      s = _mm256_add_pd(s, _mm256_mul_pd(v, v));
    }
    _mm256_storeu_pd(out + k, _mm256_sqrt_pd(s));
  }
  for (; k < count; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double v = a[c * stride + k];
      s = s + v * v;
    }
    out[k] = std::sqrt(s);
  }
}

double max_avx2(const double* x, std::size_t count) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  if (count >= 4) {
    __m256d acc = _mm256_set1_pd(m);
    for (; k + 4 <= count; k += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + k));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (double v : lanes) m = v > m ? v : m;
  }
  for (; k < count; ++k) m = x[k] > m ? x[k] : m;
  return m;
}

void min_avx2(const double* a, const double* b, double* out, std::size_t count) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4)
    _mm256_storeu_pd(out + k, _mm256_min_pd(_mm256_loadu_pd(b + k), _mm256_loadu_pd(a + k)));
  for (; k < count; ++k) out[k] = b[k] < a[k] ? b[k] : a[k];
}

}  // namespace

const KernelTable& avx2_table() {
  static constexpr KernelTable table{"avx2", distance_avx2, norm_avx2, max_avx2, min_avx2};
  return table;
}

}  // namespace unpred::kernels
