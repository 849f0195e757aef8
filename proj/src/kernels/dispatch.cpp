#include <cstdlib>
#include <string_view>
#include <vector>

#include "unpred/kernels.hpp"

namespace unpred::kernels {

#if defined(UNPRED_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(UNPRED_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("UNPRED_KERNELS");
    if (env && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

void sliding_min(const KernelTable& kt, const double* x, std::size_t count, std::size_t w, double* out) {
  const std::size_t width = 2 * w + 1;
  if (count < width) return;
  if (w == 0) {
    for (std::size_t k = 0; k < count; ++k) out[k] = x[k];
    return;
  }
  // prefix[i]: min from the start of i's block up to i; suffix[i]: min from
  // i to the end of its block. Window [k - w, k + w] = suffix[k - w] merged
  // with prefix[k + w].
  std::vector<double> prefix(count), suffix(count);
  for (std::size_t start = 0; start < count; start += width) {
    const std::size_t end = start + width < count ? start + width : count;
    prefix[start] = x[start];
    for (std::size_t i = start + 1; i < end; ++i) prefix[i] = x[i] < prefix[i - 1] ? x[i] : prefix[i - 1];
    suffix[end - 1] = x[end - 1];
    for (std::size_t i = end - 1; i-- > start;) suffix[i] = x[i] < suffix[i + 1] ? x[i] : suffix[i + 1];
  }
  const std::size_t n_out = count - 2 * w;
  kt.elementwise_min(suffix.data(), prefix.data() + 2 * w, out + w, n_out);
}

}  // namespace unpred::kernels
