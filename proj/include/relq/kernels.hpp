#pragma once

#include <cstddef>
#include <string>

namespace relq::kernels {

// One Euler-Maruyama step over a block of paths:
//   x[i] += (a*x[i] + b) + sqrt((c*x[i] + d)^2 + e) * dw[i]
// a, b carry the dt factor; dw carries sqrt(dt). e = D^2 sigma^2 * (extra
// exploratory variance), 0 for classical dynamics.
struct StepParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
};

// Left-point running-cost accumulation over a block of paths:
//   cost[i] += w * (ca*x[i]^2 + cb*x[i] + cc)
// with w = e^{-rho t} * dt.
struct CostParams {
  double ca = 0.0;
  double cb = 0.0;
  double cc = 0.0;
};

using StepFn = void (*)(double* x, const double* dw, std::size_t n,
                        const StepParams& p);
using CostFn = void (*)(const double* x, double* cost, std::size_t n, double w,
                        const CostParams& p);

struct Kernels {
  StepFn step = nullptr;
  CostFn cost = nullptr;
  const char* name = "";
};

bool avx2_available();

// mode: "auto" (AVX2 when the CPU has it), "scalar", "avx2". The environment
// variable RELQ_KERNEL overrides "auto". Unknown mode or forced AVX2 on a CPU
// without it throws std::invalid_argument / std::runtime_error.
Kernels get_kernels(const std::string& mode = "auto");

// Exposed for the equivalence tests.
Kernels scalar_kernels();
Kernels avx2_kernels();  // throws if unavailable

}  // namespace relq::kernels
