#include "relq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relq {

namespace {

bool all_finite(const ThetaCoefficients& c) {
  return std::isfinite(c.A) && std::isfinite(c.B) && std::isfinite(c.C) &&
         std::isfinite(c.D) && std::isfinite(c.L) && std::isfinite(c.S) &&
         std::isfinite(c.R) && std::isfinite(c.M) && std::isfinite(c.N);
}

// rho lower-bound term for a single scenario, shared by both validators:
// 2A + C^2 + max[(D^2 S^2 - 2 R S (B + C D)) / R, 0].
double rho_excess_term(const ThetaCoefficients& c) {
  const double m =
      (c.D * c.D * c.S * c.S - 2.0 * c.R * c.S * (c.B + c.C * c.D)) / c.R;
  return 2.0 * c.A + c.C * c.C + std::max(m, 0.0);
}

}  // namespace

void ThetaCoefficients::validate() const {
  if (!all_finite(*this))
    throw std::invalid_argument("ThetaCoefficients: non-finite field");
  if (!(L > 0.0))
    throw std::invalid_argument("ThetaCoefficients: L must be > 0");
  if (!(R > 0.0))
    throw std::invalid_argument("ThetaCoefficients: R must be > 0");
}

ThetaCoefficients UniformPolyFamily::at(double theta) const {
  ThetaCoefficients c;
  c.A = A(theta);
  c.B = B(theta);
  c.C = C(theta);
  c.D = D(theta);
  c.L = L(theta);
  c.S = S(theta);
  c.R = R(theta);
  c.M = M(theta);
  c.N = N(theta);
  return c;
}

void Problem::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("Problem: rho must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("Problem: alpha must be > 0");
  if (!(x0_bound > 0.0))
    throw std::invalid_argument("Problem: x0_bound must be > 0");
  if (const auto* tp = std::get_if<TwoPointFamily>(&family)) {
    tp->theta1.validate();
    tp->theta2.validate();
  } else {
    const auto& u = std::get<UniformPolyFamily>(family);
    if (!(0.0 < u.a1 && u.a1 < u.a2))
      throw std::invalid_argument("Problem: require 0 < a1 < a2");
    for (const Polynomial* p : {&u.A, &u.B, &u.C, &u.D, &u.L, &u.S, &u.R,
                                &u.M, &u.N})
      if (p->degree() > 4)
        throw std::invalid_argument(
            "Problem: coefficient polynomials limited to degree 4");
  }
}

ThetaCoefficients coefficients_at(const CoefficientFamily& family,
                                  double theta) {
  if (const auto* tp = std::get_if<TwoPointFamily>(&family)) {
    if (theta == 1.0) return tp->theta1;
    if (theta == 2.0) return tp->theta2;
    throw std::domain_error("coefficients_at: two-point theta must be 1 or 2");
  }
  const auto& u = std::get<UniformPolyFamily>(family);
  if (!(theta >= 0.0 && theta <= u.a2))
    throw std::domain_error("coefficients_at: theta outside [0, a2]");
  return u.at(theta);
}

ValidationReport validate_two_point(const Problem& p, double lambda) {
  if (!p.is_two_point())
    throw std::invalid_argument("validate_two_point: family is not two-point");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("validate_two_point: lambda outside [0, 1]");
  const auto& tp = std::get<TwoPointFamily>(p.family);
  const ThetaCoefficients& t1 = tp.theta1;
  const ThetaCoefficients& t2 = tp.theta2;

  ValidationReport rep;
  auto add = [&rep](std::string name, bool pass, double lhs, double rhs,
                    double margin, std::string note = {}) {
    rep.items.push_back(
        {std::move(name), pass, lhs, rhs, margin, std::move(note)});
  };

  // (i) discount-rate lower bound with the two max-terms.
  const double m1 =
      (t1.D * t1.D * t1.S * t1.S - 2.0 * t1.R * t1.S * (t1.B + t1.C * t1.D)) /
      t1.R;
  const double m2 =
      (t2.D * t2.D * t2.S * t2.S - 2.0 * t2.R * t2.S * (t2.B + t2.C * t2.D)) /
      t2.R;
  const double term1 =
      2.0 * (lambda * t1.A + 0.5 * lambda * t1.C * t1.C + std::max(m1, 0.0));
  const double term2 =
      2.0 * ((1.0 - lambda) * t2.A + 0.5 * (1.0 - lambda) * t2.C * t2.C) +
      std::max(m2, 0.0);
  const double required = std::max(term1, term2);
  add("i_rho_bound", p.rho > required, p.rho, required, p.rho - required);

  // (iii) nonvanishing denominators; computed first because (ii) and (iv)
  // depend on V1, V2.
  const double den_v1 = (t1.B * t2.B + t2.C * t2.D * t1.B +
                         t1.C * t2.C * t1.D * t2.D) *
                        (t2.S * t1.B + t1.C * t1.D * t2.S);
  const double den_v2 = (t1.B * t2.B + t1.C * t1.D * t2.B +
                         t1.C * t2.C * t1.D * t2.D) *
                        (t1.S * t2.B + t2.C * t2.D * t1.S);
  const bool den1_ok = den_v1 != 0.0;
  const bool den2_ok = den_v2 != 0.0;
  add("iii_denominator_1", den1_ok, den_v1, 0.0, std::abs(den_v1),
      den1_ok ? "" : "V1 denominator vanishes");
  add("iii_denominator_2", den2_ok, den_v2, 0.0, std::abs(den_v2),
      den2_ok ? "" : "V2 denominator vanishes");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double V1 = den1_ok ? t1.S * t2.S *
                                  (t1.C * t1.D * t2.B - t2.C * t2.D * t1.B) /
                                  den_v1
                            : nan;
  const double V2 = den2_ok ? t1.S * t2.S *
                                  (t2.C * t2.D * t1.B - t1.C * t1.D * t2.B) /
                                  den_v2
                            : nan;

  // (ii) R_theta + D_theta^2 V_theta = 0; exact equality is measure-zero, so
  // |.| below 1e-9 counts as a pass and the absolute value is reported.
  constexpr double kEqTol = 1e-9;
  const double e1 = t1.R + t1.D * t1.D * V1;
  const double e2 = t2.R + t2.D * t2.D * V2;
  add("ii_R1_plus_D1sq_V1", den1_ok && std::abs(e1) <= kEqTol, e1, 0.0,
      kEqTol - std::abs(e1), den1_ok ? "" : "undefined: V1 singular");
  add("ii_R2_plus_D2sq_V2", den2_ok && std::abs(e2) <= kEqTol, e2, 0.0,
      kEqTol - std::abs(e2), den2_ok ? "" : "undefined: V2 singular");

  // (iv) S^2 + D^2 L V < 0 per scenario.
  const double s1 = t1.S * t1.S + t1.D * t1.D * t1.L * V1;
  const double s2 = t2.S * t2.S + t2.D * t2.D * t2.L * V2;
  add("iv_S1sq_plus_D1sq_L1_V1", den1_ok && s1 < 0.0, s1, 0.0, -s1,
      den1_ok ? "" : "undefined: V1 singular");
  add("iv_S2sq_plus_D2sq_L2_V2", den2_ok && s2 < 0.0, s2, 0.0, -s2,
      den2_ok ? "" : "undefined: V2 singular");

  rep.pass = std::all_of(rep.items.begin(), rep.items.end(),
                         [](const ConditionResult& c) { return c.pass; });
  return rep;
}

ValidationReport validate_uniform(const Problem& p) {
  const auto* uf = std::get_if<UniformPolyFamily>(&p.family);
  if (uf == nullptr)
    throw std::invalid_argument("validate_uniform: family is not uniform");
  const auto& u = *uf;

  // 1001 equispaced probe points over [0, a2] plus every stationary point of
  // every coefficient polynomial; the sup has no closed form in general.
  std::vector<double> grid;
  grid.reserve(1001 + 32);
  for (int i = 0; i <= 1000; ++i)
    grid.push_back(u.a2 * static_cast<double>(i) / 1000.0);
  for (const Polynomial* poly : {&u.A, &u.B, &u.C, &u.D, &u.L, &u.S, &u.R,
                                 &u.M, &u.N})
    for (double r : poly->derivative().real_roots_in(0.0, u.a2))
      grid.push_back(r);

  double sup_term = -std::numeric_limits<double>::infinity();
  double sup_theta = 0.0;
  double min_rl = std::numeric_limits<double>::infinity();
  double min_rl_theta = 0.0;
  double min_L = std::numeric_limits<double>::infinity();
  double min_R = std::numeric_limits<double>::infinity();
  for (double theta : grid) {
    const ThetaCoefficients c = u.at(theta);
    min_L = std::min(min_L, c.L);
    min_R = std::min(min_R, c.R);
    if (c.R > 0.0) {
      const double term = rho_excess_term(c);
      if (term > sup_term) {
        sup_term = term;
        sup_theta = theta;
      }
      const double rl = c.R * c.L - c.S * c.S;
      if (rl < min_rl) {
        min_rl = rl;
        min_rl_theta = theta;
      }
    }
  }

  ValidationReport rep;
  rep.items.push_back({"L_positive_on_grid", min_L > 0.0, min_L, 0.0, min_L,
                       ""});
  rep.items.push_back({"R_positive_on_grid", min_R > 0.0, min_R, 0.0, min_R,
                       ""});
  rep.items.push_back({"rho_exceeds_sup", p.rho > sup_term, p.rho, sup_term,
                       p.rho - sup_term, ""});
  rep.items.push_back({"RL_exceeds_S_squared", min_rl > 0.0, min_rl, 0.0,
                       min_rl, ""});
  rep.pass = std::all_of(rep.items.begin(), rep.items.end(),
                         [](const ConditionResult& c) { return c.pass; });
  // Worst-theta margin across both grid conditions.
  if (p.rho - sup_term <= min_rl) {
    rep.worst_theta = sup_theta;
    rep.worst_margin = p.rho - sup_term;
  } else {
    rep.worst_theta = min_rl_theta;
    rep.worst_margin = min_rl;
  }
  return rep;
}

}  // namespace relq
