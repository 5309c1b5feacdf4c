#include "relq/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kProbeBound = 5.0;
constexpr int kProbePoints = 21;

struct Quadratic {
  double a, b, c;
};

Quadratic theta_quadratic(const ThetaCoefficients& c, double rho) {
  const double bc = c.B + c.C * c.D;
  const double g = c.C * c.C + 2.0 * c.A - rho;
  return {g * c.D * c.D - bc * bc,
          g * c.R - 2.0 * c.S * bc + c.D * c.D * c.L,
          c.R * c.L - c.S * c.S};
}

// Solves an n x n system in place by Gaussian elimination with partial
// pivoting; returns false when the pivot collapses.
template <int N>
bool solve_linear(std::array<std::array<double, N>, N>& a,
                  std::array<double, N>& b) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int cc = col; cc < N; ++cc) a[r][cc] -= f * a[col][cc];
      b[r] -= f * b[col];
    }
  }
  for (int r = N - 1; r >= 0; --r) {
    double s = b[r];
    for (int cc = r + 1; cc < N; ++cc) s -= a[r][cc] * b[cc];
    b[r] = s / a[r][r];
  }
  return true;
}

double max_abs(const std::array<double, 7>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

double sum_sq(const std::array<double, 7>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

}  // namespace

ThetaValueFunction solve_theta(const ThetaCoefficients& c, double rho,
                               double alpha) {
  c.validate();
  if (!(rho > 0.0)) throw std::invalid_argument("solve_theta: rho must be > 0");
  if (!(alpha > 0.0))
    throw std::invalid_argument("solve_theta: alpha must be > 0");

  const Quadratic q = theta_quadratic(c, rho);
  ThetaValueFunction v;
  v.a_tilde = q.a;
  v.b_tilde = q.b;
  v.c_tilde = q.c;

  const auto qpos = [&](double k2) { return c.R + c.D * c.D * k2; };

  if (q.a == 0.0) {
    if (q.b == 0.0) {
      if (q.c != 0.0)
        throw SolveError("solve_theta: degenerate quadratic with no solution");
      v.k2 = 0.0;
    } else {
      v.k2 = -q.c / q.b;
    }
    v.branch = 'l';
    if (!(qpos(v.k2) > 0.0))
      throw SolveError("solve_theta: R + D^2 k2 <= 0 for the linear root");
  } else {
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc < 0.0)
      throw SolveError("solve_theta: negative discriminant, no real solution");
    const double sq = std::sqrt(disc);
    const double minus_root = (-q.b - sq) / (2.0 * q.a);
    const double plus_root = (-q.b + sq) / (2.0 * q.a);
    if (qpos(minus_root) > 0.0) {
      v.k2 = minus_root;
      v.branch = '-';
      v.rejected_k2 = plus_root;
      if (!(qpos(plus_root) > 0.0))
        v.rejection_reason = "plus root violates R + D^2 k2 > 0";
      else
        v.rejection_reason = "plus root admissible but the minus branch is preferred";
    } else if (qpos(plus_root) > 0.0) {
      v.k2 = plus_root;
      v.branch = '+';
      v.rejected_k2 = minus_root;
      v.rejection_reason = "minus root violates R + D^2 k2 > 0";
    } else {
      throw SolveError("solve_theta: both roots violate R + D^2 k2 > 0");
    }
  }

  const double qq = qpos(v.k2);
  const double lin = c.S + (c.B + c.C * c.D) * v.k2;
  const double den = qq * (rho - c.A) + c.B * lin;
  if (den == 0.0)
    throw SolveError("solve_theta: singular linear equation for k1");
  v.k1 = (qq * c.M - c.N * lin) / den;
  v.variance = alpha / qq;
  const double nb = c.N + c.B * v.k1;
  // Entropy offset consistent with the reorganized HJB; the displayed k0
  // carries a +1 inside the log term, which fails the residual identity and
  // the Monte-Carlo recovery, so the -1 form is used throughout.
  v.k0 = -nb * nb / (2.0 * rho * qq) -
         alpha * (std::log(kTwoPi * std::exp(1.0) * v.variance) - 1.0) /
             (2.0 * rho);
  return v;
}

double hjb_residual(double k2, double k1, double k0,
                    const ThetaCoefficients& c, double rho, double alpha,
                    double x) {
  const double q = c.R + c.D * c.D * k2;
  if (!(q > 0.0))
    throw std::domain_error("hjb_residual: R + D^2 k2 must be > 0");
  const double v = 0.5 * k2 * x * x + k1 * x + k0;
  const double vp = k2 * x + k1;
  const double sigma2 = alpha / q;
  const double lin = c.S * x + c.N + c.B * vp + c.C * c.D * x * k2;
  const double rhs = -lin * lin / (2.0 * q) + 0.5 * c.L * x * x + c.M * x +
                     vp * c.A * x + 0.5 * k2 * c.C * c.C * x * x -
                     0.5 * alpha *
                         (std::log(kTwoPi * std::exp(1.0) * sigma2) - 1.0);
  return rho * v - rhs;
}

double hjb_residual(const ThetaValueFunction& v, const ThetaCoefficients& c,
                    double rho, double alpha, double x) {
  return hjb_residual(v.k2, v.k1, v.k0, c, rho, alpha, x);
}

double max_hjb_residual(const ThetaValueFunction& v,
                        const ThetaCoefficients& c, double rho, double alpha,
                        double bound, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -bound + 2.0 * bound * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    m = std::max(m, std::abs(hjb_residual(v, c, rho, alpha, x)));
  }
  return m;
}

std::array<double, 7> two_point_equations(const ThetaCoefficients& t1,
                                          const ThetaCoefficients& t2,
                                          double lambda, double rho,
                                          double alpha,
                                          const std::array<double, 5>& z) {
  const double l1 = lambda, l2 = 1.0 - lambda;
  const double k21 = z[0], k22 = z[1], k11 = z[2], k12 = z[3], k0 = z[4];
  const double Rt = l1 * t1.R + l2 * t2.R;
  const double Nt = l1 * t1.N + l2 * t2.N;
  const double qt = Rt + l1 * t1.D * t1.D * k21 + l2 * t2.D * t2.D * k22;
  const double g1 = l1 * t1.A + 0.5 * l1 * t1.C * t1.C - 0.5 * rho;
  const double g2 = l2 * t2.A + 0.5 * l2 * t2.C * t2.C - 0.5 * rho;

  std::array<double, 7> r{};

  // Coupling constraints, active only at interior lambda.
  r[0] = l1 * l2 *
         (t1.S * t2.S + (t1.S * t2.B + t2.C * t2.D * t1.S) * k22 +
          (t1.B * t2.B + t2.C * t2.D * t1.B + t1.C * t2.C * t1.D * t2.D) *
              k21 * k22);
  r[1] = l1 * l2 *
         (t1.S * t2.S + (t2.S * t1.B + t1.C * t1.D * t2.S) * k21 +
          (t1.B * t2.B + t1.C * t1.D * t2.B + t1.C * t2.C * t1.D * t2.D) *
              k21 * k22);

  // Quadratic equations for the curvature entries.
  r[2] = l1 *
             (2.0 * t1.D * t1.D * g1 - l1 * t1.B * t1.B -
              2.0 * l1 * t1.C * t1.D * t1.B - l1 * t1.C * t1.C * t1.D * t1.D) *
             k21 * k21 +
         2.0 * l2 * t2.D * t2.D * g1 * k21 * k22 +
         (l1 * l1 * t1.D * t1.D * t1.L + 2.0 * Rt * g1 -
          2.0 * l1 * l1 * t1.S * t1.B - 2.0 * l1 * l1 * t1.C * t1.D * t1.S) *
             k21 +
         l1 * l2 * t2.D * t2.D * t1.L * k22 + l1 * Rt * t1.L -
         l1 * l1 * t1.S * t1.S;
  r[3] = l2 *
             (2.0 * t2.D * t2.D * g2 - l2 * t2.B * t2.B -
              2.0 * l2 * t2.C * t2.D * t2.B - l2 * t2.C * t2.C * t2.D * t2.D) *
             k22 * k22 +
         2.0 * l1 * t1.D * t1.D * g2 * k21 * k22 +
         (l2 * l2 * t2.D * t2.D * t2.L + 2.0 * Rt * g2 -
          2.0 * l2 * l2 * t2.S * t2.B - 2.0 * l2 * l2 * t2.C * t2.D * t2.S) *
             k22 +
         l1 * l2 * t1.D * t1.D * t2.L * k21 + l2 * Rt * t2.L -
         l2 * l2 * t2.S * t2.S;

  // Linear equations for the slope entries.
  const double mix =
      l1 * (t1.B + t1.C * t1.D) * k21 + l2 * (t2.B + t2.C * t2.D) * k22;
  r[4] = (2.0 * qt * (rho - l1 * t1.A) + 2.0 * l1 * l1 * t1.B * t1.S +
          2.0 * l1 * l1 * t1.B * (t1.B + t1.C * t1.D) * k21) *
             k11 +
         2.0 * l1 * l2 * (t2.B * t1.S + t2.B * t1.B * k22 +
                          t2.C * t2.D * t1.B * k22) *
             k12 -
         l1 * (2.0 * qt * t1.M - 2.0 * t1.S * Nt - 2.0 * t1.N * mix);
  r[5] = (2.0 * qt * (rho - l2 * t2.A) + 2.0 * l2 * l2 * t2.B * t2.S +
          2.0 * l2 * l2 * t2.B * (t2.B + t2.C * t2.D) * k22) *
             k12 +
         2.0 * l1 * l2 * (t1.B * t2.S + t1.B * t2.B * k21 +
                          t1.C * t1.D * t2.B * k21) *
             k11 -
         l2 * (2.0 * qt * t2.M - 2.0 * t2.S * Nt - 2.0 * t2.N * mix);

  // Constant term; must reduce to the single-scenario k0 at the endpoints.
  if (!(qt > 0.0)) {
    r[6] = 1e6 + qt * qt;  // inadmissible region, steer the solver away
  } else {
    const double bk = l1 * t1.B * k11 + l2 * t2.B * k12;
    r[6] = rho * k0 + (Nt + bk) * (Nt + bk) / (2.0 * qt) +
           0.5 * alpha *
               (std::log(kTwoPi * std::exp(1.0) * alpha / qt) - 1.0);
  }
  return r;
}

namespace {

// Max HJB residual used to rank branches: at the lambda endpoints the active
// block is a single-scenario quadratic and the pointwise residual applies;
// at interior lambda the algebraic residual is the only meaningful measure.
double branch_hjb_residual(const ThetaCoefficients& t1,
                           const ThetaCoefficients& t2, double lambda,
                           double rho, double alpha,
                           const TwoPointSolution& s) {
  auto probe = [&](const ThetaCoefficients& c, double k2, double k1) {
    double m = 0.0;
    const double q = c.R + c.D * c.D * k2;
    if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
    for (int i = 0; i < kProbePoints; ++i) {
      const double x = -kProbeBound + 2.0 * kProbeBound *
                                         static_cast<double>(i) /
                                         static_cast<double>(kProbePoints - 1);
      m = std::max(m, std::abs(hjb_residual(k2, k1, s.k0, c, rho, alpha, x)));
    }
    return m;
  };
  if (lambda == 1.0) return probe(t1, s.k21, s.k11);
  if (lambda == 0.0) return probe(t2, s.k22, s.k12);
  return s.eq_residual;
}

struct BranchSeed {
  int id;
  double k21, k22;
};

}  // namespace

std::vector<TwoPointSolution> solve_two_point_numeric(
    const ThetaCoefficients& t1, const ThetaCoefficients& t2, double lambda,
    double rho, double alpha) {
  t1.validate();
  t2.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("solve_two_point_numeric: lambda in [0,1]");

  // Seeds from the decoupled single-scenario quadratics, minus branch first.
  auto roots_of = [&](const ThetaCoefficients& c) -> std::array<double, 2> {
    const Quadratic q = theta_quadratic(c, rho);
    if (q.a == 0.0) {
      const double r = (q.b == 0.0) ? 0.0 : -q.c / q.b;
      return {r, r};
    }
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc < 0.0)
      throw SolveError(
          "solve_two_point_numeric: scenario quadratic has no real root");
    const double sq = std::sqrt(disc);
    return {(-q.b - sq) / (2.0 * q.a), (-q.b + sq) / (2.0 * q.a)};
  };
  const auto roots1 = roots_of(t1);
  const auto roots2 = roots_of(t2);
  const std::array<BranchSeed, 4> seeds{{{0, roots1[0], roots2[0]},
                                         {1, roots1[0], roots2[1]},
                                         {2, roots1[1], roots2[0]},
                                         {3, roots1[1], roots2[1]}}};

  auto equations = [&](const std::array<double, 5>& z) {
    return two_point_equations(t1, t2, lambda, rho, alpha, z);
  };

  std::vector<TwoPointSolution> accepted;
  std::ostringstream failures;

  for (const BranchSeed& seed : seeds) {
    std::array<double, 5> z{seed.k21, seed.k22, 0.0, 0.0, 0.0};
    std::array<double, 7> r = equations(z);
    bool converged = max_abs(r) < 1e-12;

    for (int iter = 0; iter < 200 && !converged; ++iter) {
      // Finite-difference Jacobian; the system is polynomial apart from the
      // log in the constant equation, so forward differences are adequate.
      std::array<std::array<double, 5>, 7> jac{};
      for (int j = 0; j < 5; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
        std::array<double, 5> zp = z;
        zp[j] += h;
        const auto rp = equations(zp);
        for (int i = 0; i < 7; ++i) jac[i][j] = (rp[i] - r[i]) / h;
      }
      // Gauss-Newton step via the normal equations.
      std::array<std::array<double, 5>, 5> jtj{};
      std::array<double, 5> jtr{};
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          double s = 0.0;
          for (int k = 0; k < 7; ++k) s += jac[k][i] * jac[k][j];
          jtj[i][j] = s;
        }
        double s = 0.0;
        for (int k = 0; k < 7; ++k) s += jac[k][i] * r[k];
        jtr[i] = -s;
      }
      if (!solve_linear<5>(jtj, jtr)) break;

      // Damping by step halving, up to 40 halvings.
      const double ssq0 = sum_sq(r);
      double scale = 1.0;
      bool improved = false;
      std::array<double, 5> zn{};
      std::array<double, 7> rn{};
      for (int h = 0; h < 40; ++h, scale *= 0.5) {
        for (int j = 0; j < 5; ++j) zn[j] = z[j] + scale * jtr[j];
        rn = equations(zn);
        if (sum_sq(rn) < ssq0) {
          improved = true;
          break;
        }
      }
      if (!improved) break;
      double step_norm = 0.0;
      for (int j = 0; j < 5; ++j)
        step_norm = std::max(step_norm, std::abs(zn[j] - z[j]));
      z = zn;
      r = rn;
      if (max_abs(r) < 1e-12 || step_norm < 1e-14) converged = true;
    }

    const double final_res = max_abs(r);
    const double qt = lambda * t1.R + (1.0 - lambda) * t2.R +
                      lambda * t1.D * t1.D * z[0] +
                      (1.0 - lambda) * t2.D * t2.D * z[1];
    if (final_res <= 1e-8 && qt > 0.0) {
      TwoPointSolution s;
      s.lambda = lambda;
      s.k21 = z[0];
      s.k22 = z[1];
      s.k11 = z[2];
      s.k12 = z[3];
      s.k0 = z[4];
      s.branch_id = seed.id;
      s.eq_residual = final_res;
      s.residual = branch_hjb_residual(t1, t2, lambda, rho, alpha, s);
      // Drop duplicates (several seeds collapse at the endpoints).
      const bool dup = std::any_of(
          accepted.begin(), accepted.end(), [&](const TwoPointSolution& o) {
            return std::abs(o.k21 - s.k21) < 1e-6 &&
                   std::abs(o.k22 - s.k22) < 1e-6 &&
                   std::abs(o.k11 - s.k11) < 1e-6 &&
                   std::abs(o.k12 - s.k12) < 1e-6;
          });
      if (!dup) accepted.push_back(s);
    } else {
      failures << " branch " << seed.id << ": residual " << final_res
               << (qt > 0.0 ? "" : " (variance denominator <= 0)") << ";";
    }
  }

  if (accepted.empty())
    throw SolveError("solve_two_point_numeric: no branch converged:" +
                     failures.str());
  // Residuals below the acceptance threshold are numerical noise; treating
  // them as ties keeps the minus-branch seeds first (stable sort preserves
  // seed order), matching the branch preference of solve_theta.
  const auto rank = [](double r) { return r <= 1e-8 ? 0.0 : r; };
  std::stable_sort(accepted.begin(), accepted.end(),
                   [&](const TwoPointSolution& a, const TwoPointSolution& b) {
                     return rank(a.residual) < rank(b.residual);
                   });
  return accepted;
}

TwoPointSolution solve_two_point_closed(const ThetaCoefficients& t1,
                                        const ThetaCoefficients& t2,
                                        double lambda, double rho,
                                        double alpha) {
  t1.validate();
  t2.validate();
  const double l1 = lambda, l2 = 1.0 - lambda;
  const double Rt = l1 * t1.R + l2 * t2.R;
  const double Nt = l1 * t1.N + l2 * t2.N;

  const double cc = t1.C * t2.C * t1.D * t2.D;
  const double num_u1 = (t1.B * t2.B + t1.C * t1.D * t2.B + cc) *
                        (t1.S * t2.B + t2.C * t2.D * t1.S);
  const double num_u2 = (t1.B * t2.B + t2.C * t2.D * t1.B + cc) *
                        (t2.S * t1.B + t1.C * t1.D * t2.S);

  TwoPointSolution s;
  s.lambda = lambda;

  // U and V carry each other's products as denominators; a zero denominator
  // is tolerated only where the factor multiplying the term is exactly zero.
  auto ratio = [](double num, double den, double factor,
                  const char* what) -> double {
    if (den == 0.0) {
      if (factor == 0.0) return 0.0;
      throw SolveError(std::string("solve_two_point_closed: singular ") +
                       what);
    }
    return num / den;
  };
  s.U1 = ratio(num_u1, num_u2, l2, "U1");
  s.U2 = ratio(num_u2, num_u1, l1, "U2");
  s.V1 = ratio(t1.S * t2.S * (t1.C * t1.D * t2.B - t2.C * t2.D * t1.B),
               num_u2, l1, "V1");
  s.V2 = ratio(t1.S * t2.S * (t2.C * t2.D * t1.B - t1.C * t1.D * t2.B),
               num_u1, l2, "V2");

  const double g1 = l1 * t1.A + 0.5 * l1 * t1.C * t1.C - 0.5 * rho;
  const double g2 = l2 * t2.A + 0.5 * l2 * t2.C * t2.C - 0.5 * rho;
  s.F1 = 2.0 * l1 * t1.D * t1.D * (l1 * t1.A - 0.5 * rho) -
         l1 * l1 * t1.B * t1.B - 2.0 * l1 * l1 * t1.C * t1.D * t1.B +
         2.0 * l2 * t2.D * t2.D * g1 * s.U2;
  s.F2 = 2.0 * l2 * t2.D * t2.D * (l2 * t2.A - 0.5 * rho) -
         l2 * l2 * t2.B * t2.B - 2.0 * l2 * l2 * t2.C * t2.D * t2.B +
         2.0 * l1 * t1.D * t1.D * g2 * s.U1;
  s.G1 = l1 * (l1 * t1.D * t1.D * t1.L - 2.0 * l1 * t1.S * t1.B -
               2.0 * l1 * t1.C * t1.D * t1.S + 4.0 * t1.R * g1);
  s.G2 = l2 * (l2 * t2.D * t2.D * t2.L - 2.0 * l2 * t2.S * t2.B -
               2.0 * l2 * t2.C * t2.D * t2.S + 4.0 * t2.R * g2);
  s.H1 = -l1 * l1 * (t1.S * t1.S + t1.D * t1.D * t1.L * s.V1);
  s.H2 = -l2 * l2 * (t2.S * t2.S + t2.D * t2.D * t2.L * s.V2);

  auto k2_entry = [](double F, double G, double H, double lam,
                     const char* which) -> double {
    if (lam == 0.0) return 0.0;
    if (F == 0.0)
      throw SolveError(std::string("solve_two_point_closed: degenerate "
                                   "quadratic F for ") +
                       which);
    const double disc = G * G - 4.0 * F * H;
    if (disc < 0.0)
      throw SolveError(std::string("solve_two_point_closed: negative "
                                   "discriminant for ") +
                       which);
    return std::sqrt(lam) * (G - std::sqrt(disc)) / (2.0 * F);
  };
  s.k21 = k2_entry(s.F1, s.G1, s.H1, l1, "k21");
  s.k22 = k2_entry(s.F2, s.G2, s.H2, l2, "k22");

  const double qt = Rt + l1 * t1.D * t1.D * s.k21 + l2 * t2.D * t2.D * s.k22;
  s.O1 = 2.0 * qt * (rho - l1 * t1.A) +
         2.0 * l1 * l1 * t1.B * (t1.S + s.k21 + t1.C * t1.D * s.k21);
  s.O2 = 2.0 * qt * (rho - l2 * t2.A) +
         2.0 * l2 * l2 * t2.B * (t2.S + s.k22 + t2.C * t2.D * s.k22);
  const double mix = l1 * (t1.B + t1.C * t1.D) * s.k21 +
                     l2 * (t2.B + t2.C * t2.D) * s.k22;
  s.P1 = 2.0 * qt * t1.M - 2.0 * t1.S * Nt - 2.0 * t1.N * mix;
  s.P2 = 2.0 * qt * t2.M - 2.0 * t2.S * Nt - 2.0 * t2.N * mix;
  if (s.O1 == 0.0 || s.O2 == 0.0)
    throw SolveError("solve_two_point_closed: singular linear system (O)");
  s.k11 = l1 * s.P1 / s.O1;
  s.k12 = l2 * s.P2 / s.O2;

  if (!(qt > 0.0))
    throw SolveError("solve_two_point_closed: variance denominator <= 0");
  const double bk = l1 * t1.B * s.k11 + l2 * t2.B * s.k12;
  // K0 exactly as displayed, e^2 * pi * alpha inside the log included.
  s.k0 = -(Nt * Nt + 2.0 * Nt * bk + bk * bk) / (2.0 * qt * rho) -
         0.5 * alpha * std::log(std::exp(2.0) * M_PI * alpha / qt);

  const auto r = two_point_equations(t1, t2, lambda, rho, alpha,
                                     {s.k21, s.k22, s.k11, s.k12, s.k0});
  s.eq_residual = max_abs(r);
  s.residual = branch_hjb_residual(t1, t2, lambda, rho, alpha, s);
  return s;
}

double two_point_route_disagreement(const TwoPointSolution& closed,
                                    const TwoPointSolution& numeric) {
  const std::array<std::pair<double, double>, 5> pairs{
      {{closed.k21, numeric.k21},
       {closed.k22, numeric.k22},
       {closed.k11, numeric.k11},
       {closed.k12, numeric.k12},
       {closed.k0, numeric.k0}}};
  double m = 0.0;
  for (const auto& [a, b] : pairs)
    m = std::max(m, std::abs(a - b) / (1.0 + std::abs(b)));
  return m;
}

}  // namespace relq
