#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "relq/model.hpp"

namespace relq {

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadratic value function v(x) = k2/2 x^2 + k1 x + k0 for one scenario,
// together with the quadratic a~ k2^2 + b~ k2 + c~ = 0 it solves and the
// Gaussian exploration variance alpha / (R + D^2 k2).
struct ThetaValueFunction {
  double k2 = 0.0;
  double k1 = 0.0;
  double k0 = 0.0;
  double a_tilde = 0.0;
  double b_tilde = 0.0;
  double c_tilde = 0.0;
  double variance = 0.0;

  // '-' for the default minus branch, '+' for the positivity fallback,
  // 'l' when the quadratic degenerates to a linear equation.
  char branch = '-';
  double rejected_k2 = 0.0;       // the other root, when one was rejected
  std::string rejection_reason;   // why it was rejected (empty if none)

  double value(double x) const { return 0.5 * k2 * x * x + k1 * x + k0; }
};

// Closed-form single-scenario solve. Throws SolveError when the discriminant
// is negative (no real solution) or when neither root keeps R + D^2 k2 > 0.
ThetaValueFunction solve_theta(const ThetaCoefficients& c, double rho,
                               double alpha);

// Pointwise residual of the reorganized stationary HJB equation at state x
// for the quadratic (k2, k1, k0). Exactly zero characterizes a solution.
// Throws std::domain_error when R + D^2 k2 <= 0.
double hjb_residual(double k2, double k1, double k0,
                    const ThetaCoefficients& c, double rho, double alpha,
                    double x);
double hjb_residual(const ThetaValueFunction& v, const ThetaCoefficients& c,
                    double rho, double alpha, double x);

// Max |hjb_residual| over n equispaced points in [-bound, bound].
double max_hjb_residual(const ThetaValueFunction& v,
                        const ThetaCoefficients& c, double rho, double alpha,
                        double bound, int n = 21);

// Two-point quadratic ansatz V = lambda-block(k21, k11) + block(k22, k12)
// sharing the constant k0; K2 is diagonal so cross-partials vanish by
// construction.
struct TwoPointSolution {
  double lambda = 0.0;
  double k21 = 0.0;
  double k22 = 0.0;
  double k11 = 0.0;
  double k12 = 0.0;
  double k0 = 0.0;
  int branch_id = 0;       // seed combination 0..3 (minus/plus per scenario)
  double residual = 0.0;   // max HJB residual on the probe grid (see below)
  double eq_residual = 0.0;  // max |seven algebraic equations|

  // Intermediates of the closed-form route (meaningful only for
  // solve_two_point_closed output).
  double F1 = 0.0, G1 = 0.0, H1 = 0.0, O1 = 0.0, P1 = 0.0;
  double F2 = 0.0, G2 = 0.0, H2 = 0.0, O2 = 0.0, P2 = 0.0;
  double U1 = 0.0, U2 = 0.0, V1 = 0.0, V2 = 0.0;
};

// The seven algebraic equations of the two-point ansatz, as residuals.
// z = (k21, k22, k11, k12, k0).
std::array<double, 7> two_point_equations(const ThetaCoefficients& t1,
                                          const ThetaCoefficients& t2,
                                          double lambda, double rho,
                                          double alpha,
                                          const std::array<double, 5>& z);

// Closed-form route, implemented as displayed (including the lambda^{1/2}
// prefactors); cross-checked against the numeric route but not trusted.
// Throws SolveError on degenerate F, negative discriminant, or singular O/U/V.
TwoPointSolution solve_two_point_closed(const ThetaCoefficients& t1,
                                        const ThetaCoefficients& t2,
                                        double lambda, double rho,
                                        double alpha);

// Numeric route: damped Gauss-Newton on the seven-equation system from each
// of the four branch seeds. Returns every branch whose equation residual is
// <= 1e-8, sorted by HJB residual (stable, minus-branch seeds first). Throws
// SolveError carrying per-branch final residuals when no branch converges.
// The system is consistent at the endpoints lambda in {0, 1}, where the
// worst-case mixing weight lives; at interior lambda it is overdetermined
// and generically admits only least-squares stationary points, which are
// rejected and reported through the SolveError diagnostics.
std::vector<TwoPointSolution> solve_two_point_numeric(
    const ThetaCoefficients& t1, const ThetaCoefficients& t2, double lambda,
    double rho, double alpha);

// Relative disagreement between the closed-form and best numeric branch in
// (k21, k22, k11, k12, k0); used by reports, never hidden.
double two_point_route_disagreement(const TwoPointSolution& closed,
                                    const TwoPointSolution& numeric);

}  // namespace relq
