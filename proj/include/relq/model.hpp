#pragma once

#include <string>
#include <variant>
#include <vector>

#include "relq/polynomial.hpp"

namespace relq {

// One market scenario: linear dynamics dx = (Ax+Bu)dt + (Cx+Du)dW and
// quadratic running cost f(x,u) = L/2 x^2 + S x u + R/2 u^2 + M x + N u.
struct ThetaCoefficients {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double L = 1.0;
  double S = 0.0;
  double R = 1.0;
  double M = 0.0;
  double N = 0.0;

  // Throws std::invalid_argument unless L > 0, R > 0 and all fields finite.
  void validate() const;
};

struct TwoPointFamily {
  ThetaCoefficients theta1;
  ThetaCoefficients theta2;
};

// Coefficients are polynomials in theta with theta ~ Uniform(0, a),
// a in [a1, a2].
struct UniformPolyFamily {
  Polynomial A, B, C, D;
  Polynomial L, S, R, M, N;
  double a1 = 0.0;
  double a2 = 1.0;

  ThetaCoefficients at(double theta) const;
};

using CoefficientFamily = std::variant<TwoPointFamily, UniformPolyFamily>;

struct Problem {
  CoefficientFamily family;
  double rho = 1.0;     // discount rate, > 0
  double alpha = 1.0;   // exploration weight, > 0
  double x0_bound = 1.0;  // state bound M, > 0

  void validate() const;
  bool is_two_point() const {
    return std::holds_alternative<TwoPointFamily>(family);
  }
};

struct ConditionResult {
  std::string name;
  bool pass = false;
  double lhs = 0.0;   // evaluated left-hand side
  double rhs = 0.0;   // bound it is compared against
  double margin = 0.0;  // signed margin, positive = pass
  std::string note;
};

struct ValidationReport {
  std::vector<ConditionResult> items;
  bool pass = false;
  double worst_theta = 0.0;   // uniform family: theta with smallest margin
  double worst_margin = 0.0;  // uniform family: that margin
};

// Well-posedness checks for a two-point family at mixing weight lambda.
// Division by zero in the V1/V2 denominators is reported as a condition-(iii)
// failure, never thrown.
ValidationReport validate_two_point(const Problem& p, double lambda);

// Well-posedness checks for a uniform family: the rho lower bound and
// R*L > S^2 on a 1001-point grid over [0, a2] augmented with the stationary
// points of every coefficient polynomial.
ValidationReport validate_uniform(const Problem& p);

// Evaluates the family at theta. Two-point families accept theta in {1, 2};
// uniform families accept theta in [0, a2]. Out-of-domain theta throws
// std::domain_error.
ThetaCoefficients coefficients_at(const CoefficientFamily& family,
                                  double theta);

}  // namespace relq
