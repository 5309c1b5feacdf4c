#pragma once

#include <vector>

#include "relq/model.hpp"
#include "relq/riccati.hpp"
#include "relq/rng.hpp"

namespace relq {

// Relaxed control distribution u | x ~ N(mean_slope * x + mean_intercept,
// variance). variance * (R + D^2 k2) = alpha by construction.
struct GaussianPolicy {
  double mean_slope = 0.0;
  double mean_intercept = 0.0;
  double variance = 1.0;

  double mean(double x) const { return mean_slope * x + mean_intercept; }
};

// Gibbs density normalized on a finite u-grid by the trapezoid rule.
struct GridGibbsPolicy {
  std::vector<double> u_grid;
  std::vector<double> weights;  // density values, trapezoid-integrate to 1

  double mean() const;
  double variance() const;
};

GaussianPolicy gaussian_from_value(const ThetaCoefficients& c,
                                   const ThetaValueFunction& v, double alpha);

// Exponent convention: exp{-(1/alpha)(f + v' b + 1/2 v'' sigma^2)}. The
// displayed convention (positive exponent, no 1/alpha) is kept available for
// inspection; it does not reproduce the Gaussian policy.
enum class GibbsSign { negated_scaled, displayed };

GridGibbsPolicy gibbs_on_grid(const ThetaCoefficients& c, double k2, double k1,
                              double k0, double alpha, double x,
                              const std::vector<double>& u_grid,
                              GibbsSign sign = GibbsSign::negated_scaled);

// Default grid for LQ instances: mean +- 8 sigma, 801 points.
std::vector<double> default_u_grid(const GaussianPolicy& p, double x,
                                   int points = 801, double half_width = 8.0);

double entropy(const GaussianPolicy& p);
double entropy(const GridGibbsPolicy& p);

// One draw u ~ N(mean(x), variance); variance is clamped below at 1e-300.
double sample(const GaussianPolicy& p, double x, RngStream& rng);

}  // namespace relq
