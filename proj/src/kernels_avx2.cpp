#include "relq/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <cmath>

namespace relq::kernels {

// Same arithmetic as the scalar kernels, four lanes at a time. No FMA: the
// scalar reference is compiled without contraction, so explicit mul+add here
// keeps the two variants bit-identical.

__attribute__((target("avx2"))) void step_avx2(double* x, const double* dw,
                                               std::size_t n,
                                               const StepParams& p) {
  const __m256d a = _mm256_set1_pd(p.a);
  const __m256d b = _mm256_set1_pd(p.b);
  const __m256d c = _mm256_set1_pd(p.c);
  const __m256d d = _mm256_set1_pd(p.d);
  const __m256d e = _mm256_set1_pd(p.e);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d dwi = _mm256_loadu_pd(dw + i);
    const __m256d diff = _mm256_add_pd(_mm256_mul_pd(c, xi), d);
    const __m256d rad = _mm256_add_pd(_mm256_mul_pd(diff, diff), e);
    const __m256d drift = _mm256_add_pd(_mm256_mul_pd(a, xi), b);
    const __m256d noise = _mm256_mul_pd(_mm256_sqrt_pd(rad), dwi);
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_add_pd(xi, drift), noise));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double diff = p.c * xi + p.d;
    x[i] = xi + (p.a * xi + p.b) + std::sqrt(diff * diff + p.e) * dw[i];
  }
}

__attribute__((target("avx2"))) void cost_avx2(const double* x, double* cost,
                                               std::size_t n, double w,
                                               const CostParams& p) {
  const __m256d ca = _mm256_set1_pd(p.ca);
  const __m256d cb = _mm256_set1_pd(p.cb);
  const __m256d cc = _mm256_set1_pd(p.cc);
  const __m256d wv = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d ci = _mm256_loadu_pd(cost + i);
    const __m256d quad = _mm256_add_pd(
        _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(ca, xi), cb), xi), cc);
    _mm256_storeu_pd(cost + i, _mm256_add_pd(ci, _mm256_mul_pd(wv, quad)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    cost[i] = cost[i] + w * ((p.ca * xi + p.cb) * xi + p.cc);
  }
}

Kernels avx2_kernels_impl() { return {step_avx2, cost_avx2, "avx2"}; }

}  // namespace relq::kernels

#endif  // x86_64
