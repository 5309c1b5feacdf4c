#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "relq/kernels.hpp"
#include "relq/riccati.hpp"
#include "relq/rng.hpp"
#include "relq/sde.hpp"

using namespace relq;

namespace {

ThetaCoefficients derived_instance() {
  ThetaCoefficients c;
  c.B = 1.0;
  c.D = 1.0;
  c.L = 1.0;
  c.R = 1.0;
  return c;
}

SimConfig quick_cfg(double rho) {
  SimConfig cfg;
  cfg.dt = 1e-3;
  const double t0 = std::log(1e4) / rho;
  cfg.horizon = std::ceil(t0 / cfg.dt) * cfg.dt;
  cfg.n_paths = 20000;
  cfg.seed = 1234;
  return cfg;
}

}  // namespace

TEST_CASE("single steps") {
  ThetaCoefficients c;
  c.C = 0.4;
  c.D = 0.2;
  c.L = 1.0;
  c.R = 1.0;
  GaussianPolicy p;
  p.variance = 0.5;

  // zero drift coefficients, zero noise increment
  CHECK(step_exploratory(c, p, 1.5, 0.01, 0.0) == 1.5);

  // degenerate policy: classical geometric-type step
  ThetaCoefficients g;
  g.A = 0.3;
  g.C = 1.0;
  g.L = 1.0;
  g.R = 1.0;
  GaussianPolicy zero;
  zero.variance = 0.0;
  const double x = 2.0, dt = 0.01, dw = 0.05;
  CHECK(step_exploratory(g, zero, x, dt, dw) ==
        doctest::Approx(x + g.A * x * dt + x * dw).epsilon(1e-15));

  // derived instance, one step from x = 1 with dW = 0.1, hand-evaluated
  const ThetaCoefficients d = derived_instance();
  const auto v = solve_theta(d, 2.0, 0.5);
  const auto pol = gaussian_from_value(d, v, 0.5);
  const double mu = pol.mean(1.0);
  const double want =
      1.0 + mu * dt + std::sqrt(mu * mu + pol.variance) * 0.1;
  CHECK(step_exploratory(d, pol, 1.0, dt, 0.1) ==
        doctest::Approx(want).epsilon(1e-15));

  // classical: u = 0, C = D = 0 is a deterministic exponential Euler step
  ThetaCoefficients e;
  e.A = -1.0;
  e.L = 1.0;
  e.R = 1.0;
  CHECK(step_classical(e, 0.0, 1.0, 0.01, 0.3) == doctest::Approx(0.99));
  ThetaCoefficients zeroc;
  zeroc.L = 1.0;
  zeroc.R = 1.0;
  CHECK(step_classical(zeroc, 0.0, 1.25, 0.01, 0.3) == 1.25);
  CHECK_THROWS_AS(step_classical(zeroc, 0.0, std::nan(""), 0.01, 0.0),
                  std::domain_error);
}

TEST_CASE("one-step second moments: exploratory minus classical = D^2 s2 dt") {
  const ThetaCoefficients c = derived_instance();
  GaussianPolicy p;
  p.mean_slope = -0.3;
  p.mean_intercept = 0.1;
  p.variance = 0.4;
  const double x0 = 1.0, dt = 0.01;
  RngStream rng(55);
  const int n = 1000000;
  double m2e = 0.0, m2c = 0.0;
  const double sqrt_dt = std::sqrt(dt);
  for (int i = 0; i < n; ++i) {
    const double dw = sqrt_dt * rng.next_normal();
    const double xe = step_exploratory(c, p, x0, dt, dw);
    const double xc = step_classical(c, p.mean(x0), x0, dt, dw);
    m2e += xe * xe;
    m2c += xc * xc;
  }
  const double diff = (m2e - m2c) / n;
  const double want = c.D * c.D * p.variance * dt;
  CHECK(diff == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("zero cost coefficients: deterministic entropy-only integrand") {
  ThetaCoefficients c;
  c.L = 1e-300;
  c.R = 1e-300;
  GaussianPolicy p;
  p.variance = 0.3;
  const double rho = 1.0, alpha = 0.8;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 4.0;
  cfg.n_paths = 64;
  const auto est = estimate_cost_exploratory(c, p, 0.5, rho, alpha, cfg);
  const double H = 0.5 * std::log(2.0 * M_PI * std::exp(1.0) * p.variance);
  CHECK(est.std_error == 0.0);
  CHECK(est.mean ==
        doctest::Approx(-alpha * H * (1.0 - std::exp(-rho * cfg.horizon)) /
                        rho)
            .epsilon(2e-3));
}

TEST_CASE("derived instance: MC estimate recovers the closed-form value") {
  const ThetaCoefficients c = derived_instance();
  const double rho = 2.0, alpha = 0.5;
  const auto v = solve_theta(c, rho, alpha);
  const auto pol = gaussian_from_value(c, v, alpha);
  const SimConfig cfg = quick_cfg(rho);
  for (double x0 : {0.0, 1.0}) {
    const auto est = estimate_cost_exploratory(c, pol, x0, rho, alpha, cfg);
    CHECK(est.valid);
    CHECK(std::abs(est.mean - v.value(x0)) <= 3.0 * est.std_error);
  }
}

TEST_CASE("reproducibility and worker-count invariance") {
  const ThetaCoefficients c = derived_instance();
  const auto v = solve_theta(c, 2.0, 0.5);
  const auto pol = gaussian_from_value(c, v, 0.5);
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 2.0;
  cfg.n_paths = 3000;
  cfg.seed = 99;
  const auto a = estimate_cost_exploratory(c, pol, 1.0, 2.0, 0.5, cfg);
  const auto b = estimate_cost_exploratory(c, pol, 1.0, 2.0, 0.5, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  cfg.n_threads = 3;
  const auto t3 = estimate_cost_exploratory(c, pol, 1.0, 2.0, 0.5, cfg);
  CHECK(a.mean == t3.mean);
  CHECK(a.std_error == t3.std_error);
  if (kernels::avx2_available()) {
    SimConfig sc = cfg;
    sc.kernel_mode = "scalar";
    SimConfig va = cfg;
    va.kernel_mode = "avx2";
    const auto es = estimate_cost_exploratory(c, pol, 1.0, 2.0, 0.5, sc);
    const auto ev = estimate_cost_exploratory(c, pol, 1.0, 2.0, 0.5, va);
    CHECK(es.mean == ev.mean);
    CHECK(es.std_error == ev.std_error);
  }
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.dt = 0.3;
  cfg.horizon = 1.0;  // not a multiple of dt
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.horizon = 1.2;
  CHECK(cfg.steps() == 4);
  CHECK(cfg.truncation_tail(2.0) == doctest::Approx(std::exp(-2.4)));
}

TEST_CASE("moment decay: deterministic contraction at rate -2") {
  ThetaCoefficients c;
  c.A = -1.0;
  c.L = 1.0;
  c.R = 1.0;
  GaussianPolicy p;  // mu = 0, and D = 0 removes policy noise entirely
  p.variance = 0.5;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 3.0;
  cfg.n_paths = 16;
  const auto rep = check_moment_decay(c, p, 1.0, cfg);
  CHECK(rep.stable);
  CHECK(rep.analytic_rate == doctest::Approx(-2.0));
  CHECK(rep.fitted_rate == doctest::Approx(-2.0).epsilon(0.01));
}

TEST_CASE("moment decay: unstable instance reported, not thrown") {
  ThetaCoefficients c;
  c.A = 0.3;
  c.C = 0.5;
  c.L = 1.0;
  c.R = 1.0;
  GaussianPolicy p;
  p.variance = 0.0;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 2.0;
  cfg.n_paths = 5000;
  cfg.seed = 7;
  const auto rep = check_moment_decay(c, p, 1.0, cfg);
  CHECK_FALSE(rep.stable);
  // moment ODE: d/dt E X^2 = (2A + C^2) E X^2 = 0.85 E X^2
  CHECK(rep.fitted_rate == doctest::Approx(0.85).epsilon(0.3));
}

TEST_CASE("moment decay: trivial start stays at zero") {
  ThetaCoefficients c;
  c.A = -1.0;
  c.L = 1.0;
  c.R = 1.0;
  GaussianPolicy p;
  p.variance = 0.0;
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  cfg.n_paths = 8;
  const auto rep = check_moment_decay(c, p, 0.0, cfg);
  CHECK(rep.trivial);
  CHECK(rep.stable);
}

TEST_CASE("admissibility probe: discounted terminal moment decreases") {
  const ThetaCoefficients c = derived_instance();
  const double rho = 2.0, alpha = 0.5;
  const auto v = solve_theta(c, rho, alpha);
  const auto pol = gaussian_from_value(c, v, alpha);
  const double t0 = 1.0;
  double prev = 1e300;
  for (double T : {t0, 2.0 * t0, 4.0 * t0}) {
    // E[X_T^2] by a small simulation
    double m2 = 0.0;
    const int n = 4000;
    const double dt = 1e-2;
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    for (int i = 0; i < n; ++i) {
      RngStream rng = RngStream::split(5, static_cast<std::uint64_t>(i));
      double x = 1.0;
      for (std::size_t s = 0; s < steps; ++s)
        x = step_exploratory(c, pol, x, dt,
                             std::sqrt(dt) * rng.next_normal());
      m2 += x * x;
    }
    const double discounted = std::exp(-rho * T) * m2 / n;
    CHECK(discounted < prev);
    prev = discounted;
  }
}
