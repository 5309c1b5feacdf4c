#pragma once

#include <utility>
#include <vector>

#include "relq/model.hpp"
#include "relq/policy.hpp"
#include "relq/riccati.hpp"
#include "relq/sde.hpp"

namespace relq {

// Worst-case measure and robust value at a state x. Two-point families carry
// lambda_star in {0, 1}; uniform families carry a_star in [a1, a2].
struct RobustSolution {
  bool two_point = true;
  double lambda_star = 1.0;
  double a_star = 0.0;
  double value = 0.0;
  ThetaValueFunction v1, v2;  // two-point: per-scenario value functions
  std::vector<std::pair<double, double>> argmax_trace;  // (candidate, value)
};

// V(x) = max{v1(x), v2(x)}; tie resolves to lambda_star = 1.
RobustSolution robust_value_two_point(const ThetaCoefficients& t1,
                                      const ThetaCoefficients& t2, double rho,
                                      double alpha, double x);

// Maximizes a |-> (1/a) int_0^a v_theta(x) dtheta over [a1, a2]:
// 101-point grid, then golden-section around the best point to width 1e-8.
// Ties resolve to the smallest a.
RobustSolution robust_value_uniform(const UniformPolyFamily& family,
                                    double rho, double alpha, double x,
                                    int a_grid_size = 101);

struct MinimaxReport {
  double inf_sup = 0.0;
  double sup_inf = 0.0;
  double gap = 0.0;          // inf_sup - sup_inf, >= 0 by matrix minimax
  double refined_gap = 0.0;  // after one lattice refinement around argmin
  bool lambda_endpoint_ok = true;  // row sup over lambda hits an endpoint
};

// Hamiltonian-level Sion-exchange check on lambda grid {0, 0.05, ..., 1}
// times a lattice of Gaussian policies around the per-scenario optima.
MinimaxReport minimax_gap(const ThetaCoefficients& t1,
                          const ThetaCoefficients& t2, double rho,
                          double alpha, double x, int lattice = 41);

struct ExplorationCostReport {
  double analytic = 0.0;   // V(x) + discounted-entropy term - classical value
  double expected = 0.0;   // -alpha / (2 rho)
  double deviation = 0.0;  // |analytic - expected|
  bool mc_run = false;
  MCEstimate mc;           // exploratory value estimate (when mc_run)
  double mc_cost = 0.0;    // cost identity with the MC value substituted
  bool pass = false;
};

// Exploration cost under the worst-case scenario of the exploratory robust
// solve; assembled exactly as stated, so the analytic path reproduces
// -alpha/(2 rho) identically. mc_cfg == nullptr skips the MC leg.
ExplorationCostReport exploration_cost(const ThetaCoefficients& t1,
                                       const ThetaCoefficients& t2,
                                       double rho, double alpha, double x,
                                       const SimConfig* mc_cfg = nullptr);
ExplorationCostReport exploration_cost(const ThetaCoefficients& worst,
                                       double rho, double alpha, double x,
                                       const SimConfig* mc_cfg = nullptr);

struct EquivalenceReport {
  double slope_diff = 0.0;      // two code paths for the feedback mean
  double intercept_diff = 0.0;
  double classical_value = 0.0;  // exploratory value minus the entropy offset
  bool mc_run = false;
  MCEstimate mc;                 // classical MC cost under u* = mean
  double gap = 0.0;              // |mc.mean - classical_value|
  bool pass = false;             // formulas to 1e-14; MC within 3 SE
};

EquivalenceReport solvability_equivalence_check(const ThetaCoefficients& c,
                                                double rho, double alpha,
                                                double x0,
                                                const SimConfig* mc_cfg);

struct AlphaLimitReport {
  std::vector<double> alphas;
  double max_slope_drift = 0.0;
  double max_intercept_drift = 0.0;
  double max_varratio_drift = 0.0;  // variance/alpha deviation from 1/q
  double max_offset_err = 0.0;      // k0 differences vs the entropy offset
  double offset_err_display = 0.0;  // same under the +1 log variant, reported
  bool pass = false;
};

// alpha -> 0 degeneration along a decreasing list of alphas.
AlphaLimitReport alpha_limit_check(const ThetaCoefficients& c, double rho,
                                   const std::vector<double>& alphas);

}  // namespace relq
