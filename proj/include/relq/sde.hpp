#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relq/model.hpp"
#include "relq/policy.hpp"

namespace relq {

struct SimConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  int n_threads = 1;
  std::string kernel_mode = "auto";  // "auto" | "scalar" | "avx2"

  // Number of steps; throws std::invalid_argument unless horizon is an
  // integer multiple of dt (to 1e-9 relative).
  std::size_t steps() const;
  void validate() const;

  // Deliberate truncation bias bound e^{-rho T}.
  double truncation_tail(double rho) const;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t n_divergent = 0;
  bool valid = true;  // false when > 0.1% of paths diverged
};

// Single Euler-Maruyama steps, also used directly by tests.
double step_exploratory(const ThetaCoefficients& c, const GaussianPolicy& p,
                        double x, double dt, double dW);
double step_classical(const ThetaCoefficients& c, double u, double x,
                      double dt, double dW);

// E[ int_0^T e^{-rho t} (f~ - alpha H) dt ] under the exploratory dynamics,
// with the Gaussian running cost in closed form (no inner sampling).
MCEstimate estimate_cost_exploratory(const ThetaCoefficients& c,
                                     const GaussianPolicy& p, double x0,
                                     double rho, double alpha,
                                     const SimConfig& cfg);

// Classical dynamics under the deterministic feedback u(x) = mean(x), plain
// running cost f(x, u(x)), no entropy term.
MCEstimate estimate_cost_classical(const ThetaCoefficients& c,
                                   const GaussianPolicy& p, double x0,
                                   double rho, const SimConfig& cfg);

struct DecayReport {
  double fitted_rate = 0.0;    // least-squares slope of log E|X_t|^2
  double analytic_rate = 0.0;  // 2(A + B s) + (C + D s)^2, s = mean slope
  bool stable = false;         // fitted_rate < 0
  bool trivial = false;        // x0 = 0, all moments identically zero
  std::vector<double> t_grid;  // fit abscissae (second half of horizon)
  std::vector<double> log_m2;  // fitted ordinates
};

// Fits the exponential decay rate of E|X_t|^2 under the exploratory dynamics.
// Requires a homogeneous instance (mean_intercept = 0 and no additive noise)
// for the analytic rate to be meaningful.
DecayReport check_moment_decay(const ThetaCoefficients& c,
                               const GaussianPolicy& p, double x0,
                               const SimConfig& cfg);

}  // namespace relq
