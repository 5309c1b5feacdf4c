#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relq/config.hpp"
#include "relq/csv.hpp"
#include "relq/kernels.hpp"
#include "relq/model.hpp"
#include "relq/policy.hpp"
#include "relq/riccati.hpp"
#include "relq/robust.hpp"
#include "relq/sde.hpp"

namespace {

using namespace relq;

constexpr const char* kToolVersion = "1.0.0";

// Exit-code contract: 0 success, 1 check failure, 2 config error,
// 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool force = false;
  bool strict = false;
  bool verbose = false;
  int threads = 0;  // 0 = keep config value

  // simulate / sweep extras
  std::uint64_t paths = 0;
  double dt = 0.0;
  double horizon = 0.0;
  bool dump_paths = false;
  std::string kernel;
  std::string sweep_param;
  std::vector<double> sweep_values;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Default horizon T = ln(1e4)/rho, rounded up to a whole number of steps.
void finalize_sim(RunConfig& rc, const CliOptions& opt) {
  if (opt.paths > 0) rc.sim.n_paths = opt.paths;
  if (opt.dt > 0.0) rc.sim.dt = opt.dt;
  if (opt.horizon > 0.0) {
    rc.sim.horizon = opt.horizon;
    rc.horizon_set = true;
  }
  if (opt.seed_set) rc.sim.seed = opt.seed;
  if (opt.threads > 0) rc.sim.n_threads = opt.threads;
  if (!opt.kernel.empty()) rc.sim.kernel_mode = opt.kernel;
  if (!rc.horizon_set) {
    const double t0 = std::log(1e4) / rc.problem.rho;
    const auto steps = static_cast<std::uint64_t>(
        std::ceil(t0 / rc.sim.dt - 1e-9));
    rc.sim.horizon = static_cast<double>(steps) * rc.sim.dt;
  } else {
    // Snap to a whole number of steps if the user value is close.
    const double steps = std::round(rc.sim.horizon / rc.sim.dt);
    if (std::abs(steps * rc.sim.dt - rc.sim.horizon) <=
        1e-9 * std::max(1.0, rc.sim.horizon))
      rc.sim.horizon = steps * rc.sim.dt;
  }
}

ValidationReport validate_instance(const RunConfig& rc) {
  if (rc.family == "two_point")
    return validate_two_point(rc.problem, rc.lambda);
  if (rc.family == "uniform") return validate_uniform(rc.problem);
  // single scenario: grid conditions on the constant coefficients
  const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
  UniformPolyFamily fam;
  const ThetaCoefficients& c = tp.theta1;
  fam.A = Polynomial::constant(c.A);
  fam.B = Polynomial::constant(c.B);
  fam.C = Polynomial::constant(c.C);
  fam.D = Polynomial::constant(c.D);
  fam.L = Polynomial::constant(c.L);
  fam.S = Polynomial::constant(c.S);
  fam.R = Polynomial::constant(c.R);
  fam.M = Polynomial::constant(c.M);
  fam.N = Polynomial::constant(c.N);
  fam.a1 = 0.5;
  fam.a2 = 1.0;
  Problem p{fam, rc.problem.rho, rc.problem.alpha, rc.problem.x0_bound};
  return validate_uniform(p);
}

std::filesystem::path out_file(const CliOptions& opt, const std::string& id,
                               const std::string& suffix) {
  std::filesystem::create_directories(opt.out_dir);
  return std::filesystem::path(opt.out_dir) / (id + "_" + suffix);
}

void write_manifest(const CliOptions& opt, const RunConfig& rc,
                    const std::string& id, const std::string& command) {
  std::ofstream os(out_file(opt, id, "manifest.txt"));
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ",
                std::gmtime(&tt));
  os << "run_id=" << id << "\n"
     << "config_path=" << opt.config_path << "\n"
     << "command=" << command << "\n"
     << "seed=" << rc.sim.seed << "\n"
     << "timestamp=" << stamp << "\n"
     << "output_dir=" << opt.out_dir << "\n"
     << "tool_version=" << kToolVersion << "\n";
}

const ThetaCoefficients& winner_scenario(const RunConfig& rc,
                                         const RobustSolution& rs) {
  const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
  return rs.lambda_star == 1.0 ? tp.theta1 : tp.theta2;
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const CliOptions& opt, RunConfig& rc, const std::string& id) {
  const auto rep = validate_instance(rc);
  if (!rep.pass) {
    std::cerr << "assumption validation failed:\n";
    for (const auto& item : rep.items)
      if (!item.pass)
        std::cerr << "  " << item.name << ": lhs=" << item.lhs
                  << " rhs=" << item.rhs << " " << item.note << "\n";
    if (!opt.force) {
      std::cerr << "use --force to solve anyway\n";
      return kExitCheckFailed;
    }
  }

  std::ofstream csv(out_file(opt, id, "solution.csv"));
  csv_row(csv, {"run_id", "kind", "label", "k2", "k1", "k0", "k22", "k12",
                "variance", "branch", "branch_id", "residual", "eq_residual",
                "value", "note"});
  auto num = [](double v) { return csv_number(v); };

  if (rc.family == "uniform") {
    const auto& fam = std::get<UniformPolyFamily>(rc.problem.family);
    const RobustSolution rs = robust_value_uniform(
        fam, rc.problem.rho, rc.problem.alpha, rc.x0);
    for (int i = 0; i <= 10; ++i) {
      const double theta = fam.a2 * static_cast<double>(i) / 10.0;
      const ThetaCoefficients c = fam.at(theta);
      const ThetaValueFunction v =
          solve_theta(c, rc.problem.rho, rc.problem.alpha);
      csv_row(csv,
              {id, "theta", num(theta), num(v.k2), num(v.k1), num(v.k0), "",
               "", num(v.variance), std::string(1, v.branch), "",
               num(max_hjb_residual(v, c, rc.problem.rho, rc.problem.alpha,
                                    rc.problem.x0_bound)),
               "", num(v.value(rc.x0)), ""});
    }
    csv_row(csv, {id, "robust", num(rs.a_star), "", "", "", "", "", "", "",
                  "", "", "", num(rs.value), "a_star"});
    std::cout << "robust value V(" << rc.x0 << ") = " << rs.value
              << " at a* = " << rs.a_star << "\n";
    return kExitOk;
  }

  const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
  const RobustSolution rs = robust_value_two_point(
      tp.theta1, tp.theta2, rc.problem.rho, rc.problem.alpha, rc.x0);
  const ThetaValueFunction per[2] = {rs.v1, rs.v2};
  const ThetaCoefficients cs[2] = {tp.theta1, tp.theta2};
  for (int i = 0; i < 2; ++i) {
    csv_row(csv,
            {id, "theta", std::to_string(i + 1), num(per[i].k2),
             num(per[i].k1), num(per[i].k0), "", "", num(per[i].variance),
             std::string(1, per[i].branch), "",
             num(max_hjb_residual(per[i], cs[i], rc.problem.rho,
                                  rc.problem.alpha, rc.problem.x0_bound)),
             "", num(per[i].value(rc.x0)), ""});
    if (rc.family == "single") break;
  }

  if (rc.family == "two_point") {
    const auto branches =
        solve_two_point_numeric(tp.theta1, tp.theta2, rc.lambda,
                                rc.problem.rho, rc.problem.alpha);
    for (const auto& b : branches)
      csv_row(csv, {id, "branch", num(rc.lambda), num(b.k21), num(b.k11),
                    num(b.k0), num(b.k22), num(b.k12), "", "",
                    std::to_string(b.branch_id), num(b.residual),
                    num(b.eq_residual), "", "numeric"});
    try {
      const auto closed = solve_two_point_closed(
          tp.theta1, tp.theta2, rc.lambda, rc.problem.rho, rc.problem.alpha);
      csv_row(csv, {id, "branch", num(rc.lambda), num(closed.k21),
                    num(closed.k11), num(closed.k0), num(closed.k22),
                    num(closed.k12), "", "", "", num(closed.residual),
                    num(closed.eq_residual), "", "closed_form"});
      const double dis = two_point_route_disagreement(closed, branches.front());
      csv_row(csv, {id, "closed_vs_numeric", num(rc.lambda), "", "", "", "",
                    "", "", "", "", num(dis), "", "",
                    dis > 1e-8 ? "routes disagree" : "routes agree"});
      if (opt.verbose && dis > 1e-8)
        std::cout << "closed-form vs numeric disagreement: " << dis << "\n";
    } catch (const SolveError& e) {
      csv_row(csv, {id, "closed_vs_numeric", num(rc.lambda), "", "", "", "",
                    "", "", "", "", "", "", "",
                    std::string("closed form failed: ") + e.what()});
    }
  }

  csv_row(csv, {id, "robust", num(rs.lambda_star), "", "", "", "", "", "",
                "", "", "", "", num(rs.value), "lambda_star"});
  std::cout << "robust value V(" << rc.x0 << ") = " << rs.value
            << " at lambda* = " << rs.lambda_star << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(const CliOptions& opt, RunConfig& rc,
                 const std::string& id) {
  const auto rep = validate_instance(rc);
  if (!rep.pass && !opt.force) {
    std::cerr << "assumption validation failed; use --force\n";
    return kExitCheckFailed;
  }

  ThetaCoefficients scenario;
  std::string scenario_label;
  if (rc.family == "uniform") {
    const auto& fam = std::get<UniformPolyFamily>(rc.problem.family);
    const RobustSolution rs = robust_value_uniform(
        fam, rc.problem.rho, rc.problem.alpha, rc.x0);
    scenario = fam.at(0.5 * rs.a_star);  // representative theta = a*/2
    scenario_label = "theta=" + csv_number(0.5 * rs.a_star);
  } else {
    const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
    const RobustSolution rs = robust_value_two_point(
        tp.theta1, tp.theta2, rc.problem.rho, rc.problem.alpha, rc.x0);
    scenario = winner_scenario(rc, rs);
    scenario_label = rs.lambda_star == 1.0 ? "theta=1" : "theta=2";
  }

  const ThetaValueFunction v =
      solve_theta(scenario, rc.problem.rho, rc.problem.alpha);
  const GaussianPolicy pol =
      gaussian_from_value(scenario, v, rc.problem.alpha);
  const double closed = v.value(rc.x0);

  const MCEstimate est = estimate_cost_exploratory(
      scenario, pol, rc.x0, rc.problem.rho, rc.problem.alpha, rc.sim);
  const double gap = std::abs(est.mean - closed);
  const double se_mult =
      est.std_error > 0.0 ? gap / est.std_error
                          : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

  std::ofstream csv(out_file(opt, id, "estimates.csv"));
  csv_row(csv, {"run_id", "scenario", "x0", "mean", "std_error", "n_paths",
                "dt", "horizon", "n_divergent", "valid", "closed_form_value",
                "abs_gap", "se_multiple"});
  csv_row(csv, {id, scenario_label, csv_number(rc.x0), csv_number(est.mean),
                csv_number(est.std_error), std::to_string(est.n_paths),
                csv_number(est.dt), csv_number(est.horizon),
                std::to_string(est.n_divergent), est.valid ? "1" : "0",
                csv_number(closed), csv_number(gap), csv_number(se_mult)});

  if (opt.dump_paths) {
    std::ofstream dump(out_file(opt, id, "paths.csv"));
    csv_row(dump, {"t", "path_id", "x", "running_cost"});
    const std::size_t n_dump = std::min<std::size_t>(rc.sim.n_paths, 100);
    const std::size_t steps = rc.sim.steps();
    const double sqrt_dt = std::sqrt(rc.sim.dt);
    for (std::size_t pth = 0; pth < n_dump; ++pth) {
      RngStream rng = RngStream::split(rc.sim.seed, pth);
      double x = rc.x0;
      for (std::size_t t = 0; t <= steps; ++t) {
        const double mu = pol.mean(x);
        const double rc_cost =
            0.5 * scenario.L * x * x + scenario.S * x * mu +
            0.5 * scenario.R * (mu * mu + pol.variance) + scenario.M * x +
            scenario.N * mu -
            rc.problem.alpha * entropy(pol);
        csv_row(dump, {csv_number(static_cast<double>(t) * rc.sim.dt),
                       std::to_string(pth), csv_number(x),
                       csv_number(rc_cost)});
        if (t == steps) break;
        x = step_exploratory(scenario, pol, x, rc.sim.dt,
                             sqrt_dt * rng.next_normal());
      }
    }
  }

  std::cout << "estimate " << est.mean << " +- " << est.std_error
            << " (closed form " << closed << ", gap " << se_mult
            << " SE)\n";
  if (!est.valid) {
    std::cerr << "divergent paths: " << est.n_divergent << "\n";
    if (opt.strict) return kExitCheckFailed;
  }
  return kExitOk;
}

// --------------------------------------------------------------- verify ----

struct VerifyWriter {
  std::ofstream csv;
  std::string id;
  bool all_pass = true;

  void row(const std::string& name, double lhs, double rhs, double gap,
           double tol, bool pass, const std::string& note = "") {
    csv_row(csv, {id, name, csv_number(lhs), csv_number(rhs),
                  csv_number(gap), csv_number(tol), pass ? "1" : "0", note});
    if (!pass) all_pass = false;
  }
  void info(const std::string& name, const std::string& note) {
    csv_row(csv, {id, name, "", "", "", "", "1", note});
  }
};

int cmd_verify(const CliOptions& opt, RunConfig& rc, const std::string& id) {
  VerifyWriter w;
  w.csv.open(out_file(opt, id, "verify.csv"));
  w.id = id;
  csv_row(w.csv, {"run_id", "check_name", "lhs", "rhs", "gap", "tolerance",
                  "pass", "note"});

  const auto rep = validate_instance(rc);
  for (const auto& item : rep.items)
    w.row("assumption_" + item.name, item.lhs, item.rhs, item.margin, 0.0,
          item.pass, item.note);
  if (!rep.pass && !opt.force) {
    std::cerr << "assumption validation failed; use --force to run checks\n";
    return kExitCheckFailed;
  }

  const double rho = rc.problem.rho, alpha = rc.problem.alpha;
  ThetaCoefficients t1, t2;
  if (rc.family == "uniform") {
    const auto& fam = std::get<UniformPolyFamily>(rc.problem.family);
    t1 = fam.at(0.0);
    t2 = fam.at(fam.a2);
  } else {
    const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
    t1 = tp.theta1;
    t2 = tp.theta2;
  }

  // Smaller MC budget than simulate; enough for 3-SE checks.
  SimConfig mc = rc.sim;
  mc.n_paths = std::min<std::size_t>(mc.n_paths, 20000);

  try {
    const auto ec = exploration_cost(t1, t2, rho, alpha, rc.x0, &mc);
    w.row("exploration_cost_analytic", ec.analytic, ec.expected,
          ec.deviation, 1e-10, ec.deviation < 1e-10);
    w.row("exploration_cost_mc", ec.mc_cost, ec.expected,
          std::abs(ec.mc_cost - ec.expected), 3.0 * ec.mc.std_error,
          std::abs(ec.mc_cost - ec.expected) <= 3.0 * ec.mc.std_error);

    const auto eq = solvability_equivalence_check(t1, rho, alpha, rc.x0, &mc);
    w.row("equivalence_mean_formulas",
          std::max(eq.slope_diff, eq.intercept_diff), 0.0,
          std::max(eq.slope_diff, eq.intercept_diff), 1e-14,
          eq.slope_diff <= 1e-14 && eq.intercept_diff <= 1e-14);
    w.row("equivalence_classical_mc", eq.mc.mean, eq.classical_value, eq.gap,
          3.0 * eq.mc.std_error, eq.gap <= 3.0 * eq.mc.std_error);

    const auto al = alpha_limit_check(t1, rho, {alpha, 0.1 * alpha,
                                                0.01 * alpha});
    w.row("alpha_limit_mean_invariance",
          std::max(al.max_slope_drift, al.max_intercept_drift), 0.0,
          std::max(al.max_slope_drift, al.max_intercept_drift), 1e-12,
          al.max_slope_drift <= 1e-12 && al.max_intercept_drift <= 1e-12);
    w.row("alpha_limit_variance_law", al.max_varratio_drift, 0.0,
          al.max_varratio_drift, 1e-12, al.max_varratio_drift <= 1e-12);
    w.row("alpha_limit_k0_offset", al.max_offset_err, 0.0, al.max_offset_err,
          1e-12, al.max_offset_err <= 1e-12,
          "display-variant deviation " + csv_number(al.offset_err_display));

    const auto mm = minimax_gap(t1, t2, rho, alpha, rc.x0);
    w.row("minimax_weak_duality", mm.gap, 0.0, mm.gap, 1e-12,
          mm.gap >= -1e-12);
    w.row("minimax_refined_gap", mm.refined_gap, 0.0, mm.refined_gap, 1e-3,
          mm.refined_gap < 1e-3);
    w.row("minimax_lambda_endpoint", mm.lambda_endpoint_ok ? 1.0 : 0.0, 1.0,
          0.0, 0.0, mm.lambda_endpoint_ok);

    // Moment decay: meaningful only for homogeneous dynamics (no additive
    // noise, zero feedback intercept).
    const ThetaValueFunction v1 = solve_theta(t1, rho, alpha);
    const GaussianPolicy p1 = gaussian_from_value(t1, v1, alpha);
    if (t1.D == 0.0 && t1.M == 0.0 && t1.N == 0.0) {
      SimConfig dc = mc;
      dc.n_paths = std::min<std::size_t>(dc.n_paths, 4000);
      const auto decay = check_moment_decay(t1, p1, 1.0, dc);
      const double rel =
          decay.analytic_rate != 0.0
              ? std::abs(decay.fitted_rate - decay.analytic_rate) /
                    std::abs(decay.analytic_rate)
              : std::abs(decay.fitted_rate);
      w.row("moment_decay", decay.fitted_rate, decay.analytic_rate, rel,
            0.15, decay.stable && rel <= 0.15);
    } else {
      w.info("moment_decay", "skipped: inhomogeneous instance");
    }
  } catch (const SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  }

  std::cout << (w.all_pass ? "all checks passed\n" : "checks FAILED\n");
  return w.all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- sweep ----

int cmd_sweep(const CliOptions& opt, RunConfig& rc, const std::string& id,
              const std::string& config_text) {
  if (opt.sweep_param.empty() || opt.sweep_values.empty()) {
    std::cerr << "sweep requires --param and --values\n";
    return kExitConfigError;
  }
  std::ofstream csv(out_file(opt, id, "sweep.csv"));
  csv_row(csv, {"run_id", "param", "value", "metric", "result", "note"});

  for (double val : opt.sweep_values) {
    RunConfig pt = parse_config(config_text, opt.config_path);
    pt.sim = rc.sim;
    if (opt.sweep_param == "alpha")
      pt.problem.alpha = val;
    else if (opt.sweep_param == "rho")
      pt.problem.rho = val;
    else if (opt.sweep_param == "lambda")
      pt.lambda = val;
    else if (opt.sweep_param == "x0")
      pt.x0 = val;
    else {
      std::cerr << "unknown sweep parameter: " << opt.sweep_param << "\n";
      return kExitConfigError;
    }
    auto emit = [&](const std::string& metric, double result,
                    const std::string& note = "") {
      csv_row(csv, {id, opt.sweep_param, csv_number(val), metric,
                    csv_number(result), note});
    };
    try {
      ThetaCoefficients t1, t2;
      if (pt.family == "uniform") {
        const auto& fam = std::get<UniformPolyFamily>(pt.problem.family);
        t1 = fam.at(0.0);
        t2 = fam.at(fam.a2);
      } else {
        const auto& tp = std::get<TwoPointFamily>(pt.problem.family);
        t1 = tp.theta1;
        t2 = tp.theta2;
      }
      const RobustSolution rs = robust_value_two_point(
          t1, t2, pt.problem.rho, pt.problem.alpha, pt.x0);
      const ThetaValueFunction& win =
          rs.lambda_star == 1.0 ? rs.v1 : rs.v2;
      emit("k2", win.k2);
      emit("k1", win.k1);
      emit("k0", win.k0);
      emit("variance", win.variance);
      emit("robust_value", rs.value);
      const auto ec = exploration_cost(t1, t2, pt.problem.rho,
                                       pt.problem.alpha, pt.x0, nullptr);
      emit("exploration_cost", ec.analytic);
    } catch (const std::exception& e) {
      csv_row(csv, {id, opt.sweep_param, csv_number(val), "error", "",
                    e.what()});
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy-regularized robust LQ control solver"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "problem config file")
      ->required();
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--seed", opt.seed, "root RNG seed")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  app.add_flag("--force", opt.force, "run despite failed assumptions");
  app.add_flag("--strict", opt.strict, "nonzero exit on flagged estimates");
  app.add_flag("--verbose", opt.verbose, "extra diagnostics");
  app.add_option("--threads", opt.threads, "worker threads for simulation");
  app.fallthrough();

  auto* solve = app.add_subcommand("solve", "solve value functions");
  auto* simulate =
      app.add_subcommand("simulate", "Monte-Carlo cost estimation");
  simulate->add_option("--paths", opt.paths, "number of MC paths");
  simulate->add_option("--dt", opt.dt, "Euler step size");
  simulate->add_option("--horizon", opt.horizon, "truncation horizon T");
  simulate->add_flag("--dump-paths", opt.dump_paths,
                     "dump the first 100 trajectories");
  simulate->add_option("--kernel", opt.kernel,
                       "step kernel: auto | scalar | avx2");
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  auto* sweep = app.add_subcommand("sweep", "repeat solve over a parameter");
  sweep->add_option("--param", opt.sweep_param,
                    "parameter to sweep: alpha | rho | lambda | x0");
  sweep->add_option("--values", opt.sweep_values, "parameter values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  std::string config_text;
  RunConfig rc;
  try {
    config_text = read_file(opt.config_path);
    rc = parse_config(config_text, opt.config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) command += ' ';
    command += argv[i];
  }
  finalize_sim(rc, opt);
  // The run id hashes the subcommand, not the full argv: resource knobs like
  // --threads or --out must not change the numeric identity of a run.
  std::string subcommand = "solve";
  if (simulate->parsed()) subcommand = "simulate";
  if (verify->parsed()) subcommand = "verify";
  if (sweep->parsed()) subcommand = "sweep";
  const std::string id = run_id(config_text, subcommand, rc.sim.seed);

  try {
    write_manifest(opt, rc, id, command);
    if (solve->parsed()) return cmd_solve(opt, rc, id);
    if (simulate->parsed()) return cmd_simulate(opt, rc, id);
    if (verify->parsed()) return cmd_verify(opt, rc, id);
    if (sweep->parsed()) return cmd_sweep(opt, rc, id, config_text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}
