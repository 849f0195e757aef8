#include <cmath>
#include <limits>

#include "unpred/kernels.hpp"

namespace unpred::kernels {

namespace {

void distance_scalar(const double* a, const double* b, std::size_t dim, std::size_t stride, std::size_t count,
                     double* out) {
  for (std::size_t k = 0; k < count; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = a[c * stride + k] - b[c * stride + k];
      s = s + d * d;
    }
    out[k] = std::sqrt(s);
  }
}

void norm_scalar(const double* a, std::size_t dim, std::size_t stride, std::size_t count, double* out) {
  for (std::size_t k = 0; k < count; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double v = a[c * stride + k];
      s = s + v * v;
    }
    out[k] = std::sqrt(s);
  }
}

double max_scalar(const double* x, std::size_t count) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) m = x[k] > m ? x[k] : m;
  return m;
}

void min_scalar(const double* a, const double* b, double* out, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) out[k] = b[k] < a[k] ? b[k] : a[k];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static constexpr KernelTable table{"scalar", distance_scalar, norm_scalar, max_scalar, min_scalar};
  return table;
}

}  // namespace unpred::kernels
