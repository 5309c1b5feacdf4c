#include "relq/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "relq/kernels.hpp"
#include "relq/rng.hpp"

namespace relq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kDivergenceBound = 1e12;
constexpr std::size_t kBlock = 64;

// Order-independent reduction: pairwise sum over a fixed index order gives
// the same result regardless of how paths were distributed over workers.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

struct EngineResult {
  std::vector<double> cost;       // per-path discounted cost, path order
  std::vector<bool> diverged;     // per-path divergence flag
  std::size_t n_divergent = 0;
};

// Runs n_paths Euler-Maruyama paths in blocks, accumulating the left-point
// discounted running cost per path. Per-path RNG streams are split from the
// root seed by path index, so the result depends only on (config, seed).
EngineResult run_paths(const kernels::StepParams& sp,
                       const kernels::CostParams& cp, double x0, double rho,
                       const SimConfig& cfg) {
  const std::size_t n_steps = cfg.steps();
  const auto kern = kernels::get_kernels(cfg.kernel_mode);
  const double sqrt_dt = std::sqrt(cfg.dt);

  // Discount-times-dt table, shared by all workers.
  std::vector<double> w(n_steps);
  for (std::size_t t = 0; t < n_steps; ++t)
    w[t] = std::exp(-rho * static_cast<double>(t) * cfg.dt) * cfg.dt;

  EngineResult res;
  res.cost.assign(cfg.n_paths, 0.0);
  res.diverged.assign(cfg.n_paths, false);

  auto worker = [&](std::size_t path_begin, std::size_t path_end) {
    std::vector<RngStream> streams;
    double x[kBlock], dw[kBlock], cost[kBlock];
    bool bad[kBlock];
    for (std::size_t b = path_begin; b < path_end; b += kBlock) {
      const std::size_t m = std::min(kBlock, path_end - b);
      streams.clear();
      for (std::size_t i = 0; i < m; ++i)
        streams.push_back(RngStream::split(cfg.seed, b + i));
      std::fill(x, x + m, x0);
      std::fill(cost, cost + m, 0.0);
      std::fill(bad, bad + m, false);
      for (std::size_t t = 0; t < n_steps; ++t) {
        kern.cost(x, cost, m, w[t], cp);
        for (std::size_t i = 0; i < m; ++i)
          dw[i] = sqrt_dt * streams[i].next_normal();
        kern.step(x, dw, m, sp);
        for (std::size_t i = 0; i < m; ++i) {
          if (bad[i]) {
            x[i] = 0.0;  // frozen; excluded from the estimate
          } else if (!std::isfinite(x[i]) ||
                     std::abs(x[i]) > kDivergenceBound) {
            bad[i] = true;
            x[i] = 0.0;
          }
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        res.cost[b + i] = cost[i];
        res.diverged[b + i] = bad[i];
      }
    }
  };

  const int n_threads = std::max(1, cfg.n_threads);
  if (n_threads == 1 || cfg.n_paths <= kBlock) {
    worker(0, cfg.n_paths);
  } else {
    // Static block-aligned partition; ownership per path is fixed by index,
    // so the partition cannot affect the numbers.
    const std::size_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    std::vector<std::thread> pool;
    const std::size_t per =
        (n_blocks + static_cast<std::size_t>(n_threads) - 1) /
        static_cast<std::size_t>(n_threads);
    for (int th = 0; th < n_threads; ++th) {
      const std::size_t lo =
          std::min(static_cast<std::size_t>(th) * per * kBlock, cfg.n_paths);
      const std::size_t hi = std::min(
          (static_cast<std::size_t>(th) + 1) * per * kBlock, cfg.n_paths);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  for (bool d : res.diverged)
    if (d) ++res.n_divergent;
  return res;
}

MCEstimate reduce(const EngineResult& res, const SimConfig& cfg) {
  std::vector<double> kept;
  kept.reserve(cfg.n_paths);
  for (std::size_t i = 0; i < cfg.n_paths; ++i)
    if (!res.diverged[i]) kept.push_back(res.cost[i]);

  MCEstimate est;
  est.n_paths = kept.size();
  est.dt = cfg.dt;
  est.horizon = cfg.horizon;
  est.n_divergent = res.n_divergent;
  est.valid = res.n_divergent * 1000 <= cfg.n_paths;  // <= 0.1%
  if (kept.empty()) {
    est.valid = false;
    return est;
  }
  est.mean = pairwise_sum(kept.data(), kept.size()) /
             static_cast<double>(kept.size());
  if (kept.size() > 1) {
    std::vector<double> dev(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const double d = kept[i] - est.mean;
      dev[i] = d * d;
    }
    const double var = pairwise_sum(dev.data(), dev.size()) /
                       static_cast<double>(kept.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(kept.size()));
  }
  return est;
}

kernels::StepParams exploratory_step_params(const ThetaCoefficients& c,
                                            const GaussianPolicy& p,
                                            double dt) {
  kernels::StepParams sp;
  sp.a = (c.A + c.B * p.mean_slope) * dt;
  sp.b = c.B * p.mean_intercept * dt;
  sp.c = c.C + c.D * p.mean_slope;
  sp.d = c.D * p.mean_intercept;
  sp.e = c.D * c.D * p.variance;
  return sp;
}

}  // namespace

std::size_t SimConfig::steps() const {
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  if (n == 0 || std::abs(static_cast<double>(n) * dt - horizon) >
                    1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument(
        "SimConfig: horizon must be an integer multiple of dt");
  return n;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (!(horizon > 0.0))
    throw std::invalid_argument("SimConfig: horizon must be > 0");
  if (n_paths < 1)
    throw std::invalid_argument("SimConfig: n_paths must be >= 1");
  (void)steps();
}

double SimConfig::truncation_tail(double rho) const {
  return std::exp(-rho * horizon);
}

double step_exploratory(const ThetaCoefficients& c, const GaussianPolicy& p,
                        double x, double dt, double dW) {
  if (!std::isfinite(x))
    throw std::domain_error("step_exploratory: non-finite state");
  const double mu = p.mean(x);
  const double diff = c.C * x + c.D * mu;
  return x + (c.A * x + c.B * mu) * dt +
         std::sqrt(diff * diff + c.D * c.D * p.variance) * dW;
}

double step_classical(const ThetaCoefficients& c, double u, double x,
                      double dt, double dW) {
  if (!std::isfinite(x) || !std::isfinite(u))
    throw std::domain_error("step_classical: non-finite input");
  return x + (c.A * x + c.B * u) * dt + (c.C * x + c.D * u) * dW;
}

MCEstimate estimate_cost_exploratory(const ThetaCoefficients& c,
                                     const GaussianPolicy& p, double x0,
                                     double rho, double alpha,
                                     const SimConfig& cfg) {
  cfg.validate();
  const double s = p.mean_slope, m = p.mean_intercept, s2 = p.variance;
  // f~ under the Gaussian policy minus alpha * entropy, exact in u:
  //   E_u[f] = L/2 x^2 + S x mu + R/2 (mu^2 + s2) + M x + N mu
  kernels::CostParams cp;
  cp.ca = 0.5 * c.L + c.S * s + 0.5 * c.R * s * s;
  cp.cb = c.S * m + c.R * s * m + c.M + c.N * s;
  cp.cc = 0.5 * c.R * (m * m + s2) + c.N * m -
          alpha * 0.5 * std::log(kTwoPi * std::exp(1.0) * s2);
  const auto res =
      run_paths(exploratory_step_params(c, p, cfg.dt), cp, x0, rho, cfg);
  return reduce(res, cfg);
}

MCEstimate estimate_cost_classical(const ThetaCoefficients& c,
                                   const GaussianPolicy& p, double x0,
                                   double rho, const SimConfig& cfg) {
  cfg.validate();
  const double s = p.mean_slope, m = p.mean_intercept;
  kernels::StepParams sp;
  sp.a = (c.A + c.B * s) * cfg.dt;
  sp.b = c.B * m * cfg.dt;
  sp.c = c.C + c.D * s;
  sp.d = c.D * m;
  sp.e = 0.0;
  kernels::CostParams cp;
  cp.ca = 0.5 * c.L + c.S * s + 0.5 * c.R * s * s;
  cp.cb = c.S * m + c.R * s * m + c.M + c.N * s;
  cp.cc = 0.5 * c.R * m * m + c.N * m;
  const auto res = run_paths(sp, cp, x0, rho, cfg);
  return reduce(res, cfg);
}

DecayReport check_moment_decay(const ThetaCoefficients& c,
                               const GaussianPolicy& p, double x0,
                               const SimConfig& cfg) {
  cfg.validate();
  DecayReport rep;
  rep.analytic_rate = 2.0 * (c.A + c.B * p.mean_slope) +
                      (c.C + c.D * p.mean_slope) *
                          (c.C + c.D * p.mean_slope);
  if (x0 == 0.0 && p.mean_intercept == 0.0 && p.variance * c.D * c.D == 0.0) {
    rep.trivial = true;
    rep.stable = true;
    return rep;
  }

  const std::size_t n_steps = cfg.steps();
  std::vector<double> sum_x2(n_steps + 1, 0.0);
  for (std::size_t i = 0; i < cfg.n_paths; ++i) {
    RngStream rng = RngStream::split(cfg.seed, i);
    double x = x0;
    sum_x2[0] += x * x;
    const double sqrt_dt = std::sqrt(cfg.dt);
    for (std::size_t t = 0; t < n_steps; ++t) {
      x = step_exploratory(c, p, x, cfg.dt, sqrt_dt * rng.next_normal());
      if (!std::isfinite(x) || std::abs(x) > kDivergenceBound)
        x = std::copysign(kDivergenceBound, x);
      sum_x2[t + 1] += x * x;
    }
  }

  // Least-squares fit of log E|X_t|^2 over the second half of the horizon.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t t = n_steps / 2; t <= n_steps; ++t) {
    const double m2 = sum_x2[t] / static_cast<double>(cfg.n_paths);
    if (!(m2 > 0.0)) continue;
    const double tt = static_cast<double>(t) * cfg.dt;
    const double y = std::log(m2);
    rep.t_grid.push_back(tt);
    rep.log_m2.push_back(y);
    sx += tt;
    sy += y;
    sxx += tt * tt;
    sxy += tt * y;
    ++n;
  }
  if (n < 2) {
    rep.trivial = true;
    rep.stable = true;
    return rep;
  }
  const double dn = static_cast<double>(n);
  rep.fitted_rate = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  rep.stable = rep.fitted_rate < 0.0;
  return rep;
}

}  // namespace relq
