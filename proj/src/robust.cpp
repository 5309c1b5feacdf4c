#include "relq/robust.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Gauss-Legendre nodes/weights on [-1, 1], Newton on the Legendre recurrence.
struct GaussRule {
  std::vector<double> nodes, weights;
};

const GaussRule& gauss_legendre_64() {
  static const GaussRule rule = [] {
    constexpr int n = 64;
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(n) + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) /
               (static_cast<double>(j) + 1.0);
        }
        pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      r.nodes[i] = -z;
      r.nodes[n - 1 - i] = z;
      r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
  }();
  return rule;
}

}  // namespace

RobustSolution robust_value_two_point(const ThetaCoefficients& t1,
                                      const ThetaCoefficients& t2, double rho,
                                      double alpha, double x) {
  RobustSolution sol;
  sol.two_point = true;
  try {
    sol.v1 = solve_theta(t1, rho, alpha);
  } catch (const std::exception& e) {
    throw SolveError(std::string("scenario 1: ") + e.what());
  }
  try {
    sol.v2 = solve_theta(t2, rho, alpha);
  } catch (const std::exception& e) {
    throw SolveError(std::string("scenario 2: ") + e.what());
  }
  const double a1 = sol.v1.value(x);
  const double a2 = sol.v2.value(x);
  sol.argmax_trace = {{1.0, a1}, {0.0, a2}};
  sol.lambda_star = (a1 >= a2) ? 1.0 : 0.0;  // tie resolves to scenario 1
  sol.value = std::max(a1, a2);
  return sol;
}

RobustSolution robust_value_uniform(const UniformPolyFamily& family,
                                    double rho, double alpha, double x,
                                    int a_grid_size) {
  if (a_grid_size < 2)
    throw std::invalid_argument("robust_value_uniform: grid size >= 2");
  const GaussRule& gl = gauss_legendre_64();

  auto averaged_value = [&](double a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double theta = 0.5 * a * (gl.nodes[i] + 1.0);
      ThetaValueFunction v;
      try {
        v = solve_theta(family.at(theta), rho, alpha);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "robust_value_uniform: solve failed at theta=" << theta << ": "
           << e.what();
        throw SolveError(os.str());
      }
      acc += gl.weights[i] * v.value(x);
    }
    // (1/a) * (a/2) * sum w_i v(theta_i) = average over U(0, a).
    return 0.5 * acc;
  };

  RobustSolution sol;
  sol.two_point = false;

  std::vector<double> as(a_grid_size), vals(a_grid_size);
  for (int i = 0; i < a_grid_size; ++i) {
    as[i] = family.a1 + (family.a2 - family.a1) * static_cast<double>(i) /
                            static_cast<double>(a_grid_size - 1);
    vals[i] = averaged_value(as[i]);
    sol.argmax_trace.emplace_back(as[i], vals[i]);
  }
  const double vmax = *std::max_element(vals.begin(), vals.end());
  const double tol = 1e-12 * (1.0 + std::abs(vmax));
  int best = 0;
  while (vals[best] < vmax - tol) ++best;  // smallest a within tolerance

  // Golden-section refinement in the bracket around the best grid point.
  double lo = as[std::max(0, best - 1)];
  double hi = as[std::min(a_grid_size - 1, best + 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = averaged_value(c), fd = averaged_value(d);
  while (hi - lo > 1e-8) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = averaged_value(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = averaged_value(d);
    }
  }
  const double a_g = 0.5 * (lo + hi);
  const double v_g = averaged_value(a_g);
  if (v_g > vals[best] + tol) {
    sol.a_star = a_g;
    sol.value = v_g;
  } else {  // flat within tolerance: keep the smallest-a grid candidate
    sol.a_star = as[best];
    sol.value = vals[best];
  }
  return sol;
}

namespace {

// Hamiltonian-level objective for one scenario under a Gaussian policy,
// with the robust value function V fixed to the winner's quadratic.
double scenario_objective(const ThetaCoefficients& c, double k2, double k1,
                          double alpha, double x, double mu, double s2) {
  const double ef = 0.5 * c.L * x * x + c.S * x * mu +
                    0.5 * c.R * (mu * mu + s2) + c.M * x + c.N * mu;
  const double ent = 0.5 * std::log(kTwoPi * std::exp(1.0) * s2);
  const double vp = k2 * x + k1;
  const double diff = c.C * x + c.D * mu;
  const double esig2 = diff * diff + c.D * c.D * s2;
  return ef - alpha * ent + vp * (c.A * x + c.B * mu) + 0.5 * k2 * esig2;
}

struct GapPass {
  double inf_sup, sup_inf;
  std::size_t argmin_col;
  bool endpoint_ok;
};

GapPass evaluate_lattice(const ThetaCoefficients& t1,
                         const ThetaCoefficients& t2, double k2, double k1,
                         double rho, double alpha, double x,
                         const std::vector<std::pair<double, double>>& pis) {
  (void)rho;
  constexpr int kLambdaPts = 21;  // {0, 0.05, ..., 1}
  GapPass g{};
  g.inf_sup = std::numeric_limits<double>::infinity();
  g.sup_inf = -std::numeric_limits<double>::infinity();
  g.argmin_col = 0;
  g.endpoint_ok = true;
  std::vector<double> row_min(kLambdaPts,
                              std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < pis.size(); ++j) {
    const auto [mu, s2] = pis[j];
    const double o1 = scenario_objective(t1, k2, k1, alpha, x, mu, s2);
    const double o2 = scenario_objective(t2, k2, k1, alpha, x, mu, s2);
    double col_max = -std::numeric_limits<double>::infinity();
    double end_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kLambdaPts; ++i) {
      const double lam = static_cast<double>(i) / (kLambdaPts - 1);
      const double v = lam * o1 + (1.0 - lam) * o2;
      col_max = std::max(col_max, v);
      if (i == 0 || i == kLambdaPts - 1) end_max = std::max(end_max, v);
      row_min[i] = std::min(row_min[i], v);
    }
    if (col_max > end_max + 1e-12) g.endpoint_ok = false;
    if (col_max < g.inf_sup) {
      g.inf_sup = col_max;
      g.argmin_col = j;
    }
  }
  for (double rm : row_min) g.sup_inf = std::max(g.sup_inf, rm);
  return g;
}

std::vector<std::pair<double, double>> build_lattice(double mu_lo,
                                                     double mu_hi,
                                                     double s2_lo,
                                                     double s2_hi, int n) {
  std::vector<std::pair<double, double>> pis;
  pis.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double mu = mu_lo + (mu_hi - mu_lo) * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    for (int j = 0; j < n; ++j) {
      const double s2 = s2_lo + (s2_hi - s2_lo) * static_cast<double>(j) /
                                    static_cast<double>(n - 1);
      pis.emplace_back(mu, s2);
    }
  }
  return pis;
}

}  // namespace

MinimaxReport minimax_gap(const ThetaCoefficients& t1,
                          const ThetaCoefficients& t2, double rho,
                          double alpha, double x, int lattice) {
  if (lattice < 2) throw std::invalid_argument("minimax_gap: empty lattice");
  const RobustSolution rs = robust_value_two_point(t1, t2, rho, alpha, x);
  const ThetaValueFunction& win = (rs.lambda_star == 1.0) ? rs.v1 : rs.v2;

  const GaussianPolicy g1 = gaussian_from_value(
      t1, rs.v1, alpha);
  const GaussianPolicy g2 = gaussian_from_value(t2, rs.v2, alpha);
  const double mu1 = g1.mean(x), mu2 = g2.mean(x);
  const double sd = std::sqrt(std::max(g1.variance, g2.variance));
  const double mu_lo = std::min(mu1, mu2) - 2.0 * sd;
  const double mu_hi = std::max(mu1, mu2) + 2.0 * sd;
  const double s2_lo = 0.5 * std::min(g1.variance, g2.variance);
  const double s2_hi = 2.0 * std::max(g1.variance, g2.variance);

  auto pis = build_lattice(mu_lo, mu_hi, s2_lo, s2_hi, lattice);
  const GapPass pass1 =
      evaluate_lattice(t1, t2, win.k2, win.k1, rho, alpha, x, pis);

  MinimaxReport rep;
  rep.inf_sup = pass1.inf_sup;
  rep.sup_inf = pass1.sup_inf;
  rep.gap = pass1.inf_sup - pass1.sup_inf;
  rep.lambda_endpoint_ok = pass1.endpoint_ok;

  // One refinement: re-lattice around the argmin policy at 1/5 the spacing.
  const auto [mu_c, s2_c] = pis[pass1.argmin_col];
  const double dmu = (mu_hi - mu_lo) / static_cast<double>(lattice - 1);
  const double ds2 = (s2_hi - s2_lo) / static_cast<double>(lattice - 1);
  const double s2_rlo = std::max(0.25 * s2_lo, s2_c - 4.0 * ds2);
  auto pis2 = build_lattice(mu_c - 4.0 * dmu, mu_c + 4.0 * dmu, s2_rlo,
                            s2_c + 4.0 * ds2, lattice);
  const GapPass pass2 =
      evaluate_lattice(t1, t2, win.k2, win.k1, rho, alpha, x, pis2);
  rep.refined_gap = pass2.inf_sup - pass2.sup_inf;
  if (!pass2.endpoint_ok) rep.lambda_endpoint_ok = false;
  return rep;
}

ExplorationCostReport exploration_cost(const ThetaCoefficients& worst,
                                       double rho, double alpha, double x,
                                       const SimConfig* mc_cfg) {
  const ThetaValueFunction v = solve_theta(worst, rho, alpha);
  const GaussianPolicy pol = gaussian_from_value(worst, v, alpha);
  const double log_term = std::log(kTwoPi * std::exp(1.0) * v.variance);
  const double ent_term = alpha / (2.0 * rho) * log_term;
  const double vcl_b = v.value(x) + alpha / (2.0 * rho) * (log_term + 1.0);

  ExplorationCostReport rep;
  rep.expected = -alpha / (2.0 * rho);
  rep.analytic = v.value(x) + ent_term - vcl_b;
  rep.deviation = std::abs(rep.analytic - rep.expected);
  rep.pass = rep.deviation < 1e-10;
  if (mc_cfg != nullptr) {
    rep.mc_run = true;
    rep.mc = estimate_cost_exploratory(worst, pol, x, rho, alpha, *mc_cfg);
    rep.mc_cost = rep.mc.mean + ent_term - vcl_b;
    if (std::abs(rep.mc_cost - rep.expected) > 3.0 * rep.mc.std_error)
      rep.pass = false;
  }
  return rep;
}

ExplorationCostReport exploration_cost(const ThetaCoefficients& t1,
                                       const ThetaCoefficients& t2,
                                       double rho, double alpha, double x,
                                       const SimConfig* mc_cfg) {
  const RobustSolution rs = robust_value_two_point(t1, t2, rho, alpha, x);
  return exploration_cost(rs.lambda_star == 1.0 ? t1 : t2, rho, alpha, x,
                          mc_cfg);
}

EquivalenceReport solvability_equivalence_check(const ThetaCoefficients& c,
                                                double rho, double alpha,
                                                double x0,
                                                const SimConfig* mc_cfg) {
  const ThetaValueFunction v = solve_theta(c, rho, alpha);
  const GaussianPolicy pol = gaussian_from_value(c, v, alpha);

  // Classical feedback written out directly, guarding against divergent code
  // paths for the same formula.
  const double q = c.R + c.D * c.D * v.k2;
  const double slope_cl = -(c.S + c.B * v.k2 + c.C * c.D * v.k2) / q;
  const double intercept_cl = -(c.N + c.B * v.k1) / q;

  EquivalenceReport rep;
  rep.slope_diff = std::abs(pol.mean_slope - slope_cl);
  rep.intercept_diff = std::abs(pol.mean_intercept - intercept_cl);

  // Classical value = exploratory quadratic with the entropy offset removed
  // from the constant term.
  const double nb = c.N + c.B * v.k1;
  const double k0_cl = -nb * nb / (2.0 * rho * q);
  rep.classical_value = 0.5 * v.k2 * x0 * x0 + v.k1 * x0 + k0_cl;

  rep.pass = rep.slope_diff <= 1e-14 && rep.intercept_diff <= 1e-14;
  if (mc_cfg != nullptr) {
    rep.mc_run = true;
    rep.mc = estimate_cost_classical(c, pol, x0, rho, *mc_cfg);
    rep.gap = std::abs(rep.mc.mean - rep.classical_value);
    if (rep.gap > 3.0 * rep.mc.std_error || !rep.mc.valid) rep.pass = false;
  }
  return rep;
}

AlphaLimitReport alpha_limit_check(const ThetaCoefficients& c, double rho,
                                   const std::vector<double>& alphas) {
  if (alphas.empty())
    throw std::invalid_argument("alpha_limit_check: empty alpha list");
  AlphaLimitReport rep;
  rep.alphas = alphas;

  std::vector<ThetaValueFunction> vs;
  std::vector<GaussianPolicy> pols;
  for (double a : alphas) {
    vs.push_back(solve_theta(c, rho, a));
    pols.push_back(gaussian_from_value(c, vs.back(), a));
  }
  const double q = c.R + c.D * c.D * vs[0].k2;
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    rep.max_slope_drift = std::max(
        rep.max_slope_drift,
        std::abs(pols[i].mean_slope - pols[0].mean_slope));
    rep.max_intercept_drift = std::max(
        rep.max_intercept_drift,
        std::abs(pols[i].mean_intercept - pols[0].mean_intercept));
  }
  for (std::size_t i = 0; i < alphas.size(); ++i)
    rep.max_varratio_drift = std::max(
        rep.max_varratio_drift,
        std::abs(pols[i].variance / alphas[i] - 1.0 / q));

  auto offset = [&](double a, double shift) {
    return -a * (std::log(kTwoPi * std::exp(1.0) * a / q) + shift) /
           (2.0 * rho);
  };
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    const double dk0 = vs[i].k0 - vs[i + 1].k0;
    rep.max_offset_err =
        std::max(rep.max_offset_err,
                 std::abs(dk0 - (offset(alphas[i], -1.0) -
                                 offset(alphas[i + 1], -1.0))));
    rep.offset_err_display =
        std::max(rep.offset_err_display,
                 std::abs(dk0 - (offset(alphas[i], 1.0) -
                                 offset(alphas[i + 1], 1.0))));
  }
  rep.pass = rep.max_slope_drift <= 1e-12 && rep.max_intercept_drift <= 1e-12 &&
             rep.max_varratio_drift <= 1e-12 && rep.max_offset_err <= 1e-12;
  return rep;
}

}  // namespace relq
