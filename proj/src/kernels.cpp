#include "relq/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace relq::kernels {

#if defined(__x86_64__) || defined(_M_X64)
Kernels avx2_kernels_impl();

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

Kernels avx2_kernels() {
  if (!avx2_available())
    throw std::runtime_error("AVX2 kernels requested but CPU lacks AVX2");
  return avx2_kernels_impl();
}
#else
bool avx2_available() { return false; }

Kernels avx2_kernels() {
  throw std::runtime_error("AVX2 kernels unavailable on this architecture");
}
#endif

Kernels get_kernels(const std::string& mode) {
  std::string m = mode;
  if (m == "auto") {
    if (const char* env = std::getenv("RELQ_KERNEL")) m = env;
  }
  if (m == "auto") return avx2_available() ? avx2_kernels() : scalar_kernels();
  if (m == "scalar") return scalar_kernels();
  if (m == "avx2") return avx2_kernels();
  throw std::invalid_argument("unknown kernel mode: " + m);
}

}  // namespace relq::kernels
