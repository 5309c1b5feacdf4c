#include <cmath>

#include "relq/kernels.hpp"

// Reference kernels. Compiled with fp-contract off (see CMake) so the AVX2
// variants, which use explicit mul/add/sqrt, reproduce them bit for bit.

namespace relq::kernels {

void step_scalar(double* x, const double* dw, std::size_t n,
                 const StepParams& p) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double diff = p.c * xi + p.d;
    x[i] = xi + (p.a * xi + p.b) + std::sqrt(diff * diff + p.e) * dw[i];
  }
}

void cost_scalar(const double* x, double* cost, std::size_t n, double w,
                 const CostParams& p) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    cost[i] = cost[i] + w * ((p.ca * xi + p.cb) * xi + p.cc);
  }
}

Kernels scalar_kernels() { return {step_scalar, cost_scalar, "scalar"}; }

}  // namespace relq::kernels
