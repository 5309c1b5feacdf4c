#include "relq/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double trapezoid(const std::vector<double>& grid,
                 const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    acc += 0.5 * (f[i - 1] + f[i]) * (grid[i] - grid[i - 1]);
  return acc;
}

}  // namespace

double GridGibbsPolicy::mean() const {
  std::vector<double> f(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i)
    f[i] = u_grid[i] * weights[i];
  return trapezoid(u_grid, f);
}

double GridGibbsPolicy::variance() const {
  const double m = mean();
  std::vector<double> f(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i)
    f[i] = (u_grid[i] - m) * (u_grid[i] - m) * weights[i];
  return trapezoid(u_grid, f);
}

GaussianPolicy gaussian_from_value(const ThetaCoefficients& c,
                                   const ThetaValueFunction& v, double alpha) {
  const double q = c.R + c.D * c.D * v.k2;
  if (!(q > 0.0))
    throw std::domain_error("gaussian_from_value: R + D^2 k2 must be > 0");
  GaussianPolicy p;
  p.mean_slope = -(c.S + c.B * v.k2 + c.C * c.D * v.k2) / q;
  p.mean_intercept = -(c.N + c.B * v.k1) / q;
  p.variance = alpha / q;
  return p;
}

GridGibbsPolicy gibbs_on_grid(const ThetaCoefficients& c, double k2, double k1,
                              double k0, double alpha, double x,
                              const std::vector<double>& u_grid,
                              GibbsSign sign) {
  (void)k0;  // the constant shifts the exponent uniformly, normalized away
  if (u_grid.size() < 2)
    throw std::invalid_argument("gibbs_on_grid: grid needs >= 2 points");
  const double vp = k2 * x + k1;

  std::vector<double> expo(u_grid.size());
  double expo_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    const double u = u_grid[i];
    const double f = 0.5 * c.L * x * x + c.S * x * u + 0.5 * c.R * u * u +
                     c.M * x + c.N * u;
    const double b = c.A * x + c.B * u;
    const double s = c.C * x + c.D * u;
    const double ham = f + vp * b + 0.5 * k2 * s * s;
    expo[i] = (sign == GibbsSign::negated_scaled) ? -ham / alpha : ham;
    expo_max = std::max(expo_max, expo[i]);
  }
  if (!std::isfinite(expo_max))
    throw std::runtime_error("gibbs_on_grid: non-finite Hamiltonian on grid");

  GridGibbsPolicy g;
  g.u_grid = u_grid;
  g.weights.resize(u_grid.size());
  for (std::size_t i = 0; i < u_grid.size(); ++i)
    g.weights[i] = std::exp(expo[i] - expo_max);
  const double z = trapezoid(g.u_grid, g.weights);
  if (!(z > 0.0))
    throw std::runtime_error(
        "gibbs_on_grid: zero total weight, grid does not cover the density");
  for (double& w : g.weights) w /= z;
  return g;
}

std::vector<double> default_u_grid(const GaussianPolicy& p, double x,
                                   int points, double half_width) {
  const double m = p.mean(x);
  const double sd = std::sqrt(p.variance);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = m - half_width * sd +
              2.0 * half_width * sd * static_cast<double>(i) /
                  static_cast<double>(points - 1);
  return grid;
}

double entropy(const GaussianPolicy& p) {
  return 0.5 * std::log(kTwoPi * std::exp(1.0) * p.variance);
}

double entropy(const GridGibbsPolicy& p) {
  std::vector<double> f(p.u_grid.size());
  for (std::size_t i = 0; i < p.u_grid.size(); ++i) {
    const double w = p.weights[i];
    f[i] = (w > 0.0) ? w * std::log(w) : 0.0;
  }
  return -trapezoid(p.u_grid, f);
}

double sample(const GaussianPolicy& p, double x, RngStream& rng) {
  const double sd = std::sqrt(std::max(p.variance, 1e-300));
  return p.mean(x) + sd * rng.next_normal();
}

}  // namespace relq
