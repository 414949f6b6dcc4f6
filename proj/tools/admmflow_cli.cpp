// Copyright 2026 The admmflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// admmflow: generate problems, run ADMM / A-ADMM and their flows, fit rates.
//
// Exit codes: 0 success, 2 usage error, 3 numerical divergence,
// 4 rate check failed (rates), 1 anything else.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "admmflow/admmflow.hpp"

namespace fs = std::filesystem;
using namespace admmflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitCheckFailed = 4;

constexpr const char* kOutDirEnv = "ADMMFLOW_OUT_DIR";

constexpr const char* kCsvHelp = R"(CSV columns:
  admm, aadmm          k,t,V_gap,primal_residual,x_norm   (t = k/rho resp. k/sqrt(rho))
  admm_flow            t,V_gap,x_norm
  aadmm_flow           t,V_gap,hamiltonian,x_norm,xdot_norm
  monitors             t,E,decay_ok,residual
  rates                slope,C,window_lo,window_hi,n_samples
  plot_data            method,t,V_gap,V
A diverged run keeps its finite prefix and ends with a "#truncated,..." row.
Default output directory: $ADMMFLOW_OUT_DIR, else the current directory.)";

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

int matrix_rank(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  const double tol = 1e-8 * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > tol ? 1 : 0;
  return rank;
}

struct GenArgs {
  Figure1Params params;
  std::string out = "problem.json";
};

int cmd_gen(const GenArgs& args) {
  const SplitProblem problem = gen_figure1_problem(args.params);
  save_problem(problem, args.out);
  std::printf("wrote %s\n", args.out.c_str());
  std::printf("n=%ld m=%ld rank(M)=%d cond(A)=%.10g\n", static_cast<long>(problem.n()),
              static_cast<long>(problem.m()),
              matrix_rank(problem.f().quadratic()->hessian()), problem.cond_A());
  return kExitOk;
}

struct RunArgs {
  std::string problem;
  std::vector<std::string> solvers;
  double rho = 50.0;
  double r = 10.0;
  std::optional<double> h;
  std::optional<double> t0;
  std::optional<double> t_end;
  std::int64_t max_iter = 300;
  double stop_tol = 0.0;
  double x0 = 5.0;
  std::optional<std::string> integrator;
  std::string out_dir;
};

int cmd_run(const RunArgs& args) {
  if (args.solvers.empty()) {
    std::fprintf(stderr, "run: select at least one --solver\n");
    return kExitUsage;
  }
  std::vector<Method> methods;
  for (const auto& s : args.solvers) {
    const auto m = parse_method(s);
    if (!m) {
      std::fprintf(stderr, "run: unknown solver '%s'\n", s.c_str());
      return kExitUsage;
    }
    if (args.integrator) {
      const bool flow_ok = (*m == Method::kAdmmFlow && *args.integrator == "rk4") ||
                           (*m == Method::kAccAdmmFlow && *args.integrator == "symplectic");
      if (!is_discrete(*m) && !flow_ok) {
        std::fprintf(stderr, "run: --integrator %s does not apply to %s\n",
                     args.integrator->c_str(), s.c_str());
        return kExitUsage;
      }
    }
    methods.push_back(*m);
  }
  const SplitProblem problem = load_problem(args.problem);
  const Vector x0 = Vector::Constant(problem.n(), args.x0);
  const double v_star = optimal_value(problem).value;
  fs::create_directories(args.out_dir);

  for (Method m : methods) {
    const std::string path = (fs::path(args.out_dir) / (std::string(method_name(m)) + ".csv")).string();
    Trajectory traj;
    try {
      switch (m) {
        case Method::kAdmm:
        case Method::kAccAdmm: {
          SolverOptions opt;
          opt.rho = args.rho;
          opt.max_iter = args.max_iter;
          opt.stop_tol = args.stop_tol;
          opt.v_star = v_star;
          if (m == Method::kAccAdmm) opt.r = args.r;
          traj = run_solver(problem, x0, opt);
          break;
        }
        case Method::kAdmmFlow:
        case Method::kAccAdmmFlow: {
          const bool second = m == Method::kAccAdmmFlow;
          IntegratorConfig ic;
          ic.h = args.h.value_or(second ? kDefaultSymplecticStep : kDefaultRk4Step);
          ic.t0 = args.t0.value_or(second ? ic.h : 0.0);
          const double scale = second ? 1.0 / std::sqrt(args.rho) : 1.0 / args.rho;
          ic.t_end = args.t_end.value_or(static_cast<double>(args.max_iter) * scale);
          ic.r = args.r;
          traj = second ? aadmm_flow_integrate(problem, x0, ic, v_star)
                        : rk4_integrate(problem, x0, ic, v_star);
          break;
        }
      }
    } catch (const TrajectoryDivergence& e) {
      write_trajectory_csv(path, e.partial());
      std::fprintf(stderr, "%s: %s (partial CSV kept in %s)\n", method_name(m), e.what(),
                   path.c_str());
      return kExitDiverged;
    }
    write_trajectory_csv(path, traj);
    std::printf("%s: final V_gap %.17g at t=%.17g (%zu samples) -> %s\n", method_name(m),
                traj.back().v_gap, traj.back().t, traj.size(), path.c_str());
  }
  return kExitOk;
}

struct Figure1Args {
  Figure1Params params;
  std::vector<double> rhos;
  double r = 10.0;
  std::int64_t max_iter = 300;
  double h_rk4 = kDefaultRk4Step;
  double h_symplectic = kDefaultSymplecticStep;
  std::optional<double> t0;
  double x0 = 5.0;
  double window_lo = 2.0;
  double window_hi = 20.0;
  std::string out_dir;
};

void write_plot_data(const std::string& path, const Figure1Report& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << "method,t,V_gap,V\n";
  for (const auto* traj : {&rep.admm, &rep.aadmm, &rep.admm_flow, &rep.aadmm_flow}) {
    if (!*traj) continue;
    for (const auto& s : (*traj)->samples) {
      out << method_name((*traj)->method) << ',' << detail::format_double(s.t) << ','
          << detail::format_double(s.v_gap) << ',' << detail::format_double(s.v_gap + rep.v_star)
          << '\n';
    }
  }
}

int cmd_figure1(const Figure1Args& args) {
  std::vector<double> rhos = args.rhos.empty() ? std::vector<double>{50.0} : args.rhos;
  const SplitProblem problem = gen_figure1_problem(args.params);
  fs::create_directories(args.out_dir);
  save_problem(problem, (fs::path(args.out_dir) / "problem.json").string());

  nlohmann::ordered_json index;
  index["seed"] = args.params.seed;
  index["problem"] = "problem.json";
  index["runs"] = nlohmann::ordered_json::array();

  for (double rho : rhos) {
    ExperimentConfig config;
    config.rho = rho;
    config.r = args.r;
    config.max_iter = args.max_iter;
    config.h_rk4 = args.h_rk4;
    config.h_symplectic = args.h_symplectic;
    config.t0 = args.t0;
    config.x0_fill = args.x0;
    config.rate_window = {args.window_lo, args.window_hi};

    Figure1Report rep;
    try {
      rep = run_experiment(problem, config);
    } catch (const MethodFailure& e) {
      std::fprintf(stderr, "figure1 (rho=%g): method %s failed: %s\n", rho,
                   method_name(e.method()), e.what());
      return e.diverged() ? kExitDiverged : kExitOther;
    }

    const fs::path dir =
        rhos.size() == 1 ? fs::path(args.out_dir) : fs::path(args.out_dir) / ("rho_" + detail::format_double(rho));
    fs::create_directories(dir);
    auto file = [&](const std::string& name) { return (dir / name).string(); };
    write_trajectory_csv(file("admm.csv"), *rep.admm);
    write_trajectory_csv(file("aadmm.csv"), *rep.aadmm);
    write_trajectory_csv(file("admm_flow.csv"), *rep.admm_flow);
    write_trajectory_csv(file("aadmm_flow.csv"), *rep.aadmm_flow);
    write_monitor_csv(file("monitor_admm_stability.csv"), rep.admm_stability);
    write_monitor_csv(file("monitor_admm_rate.csv"), rep.admm_rate);
    write_monitor_csv(file("monitor_aadmm_stability.csv"), rep.aadmm_stability);
    write_monitor_csv(file("monitor_aadmm_rate.csv"), rep.aadmm_rate);
    {
      std::ofstream out(file("rates.csv"), std::ios::binary);
      out << "method," << kRateSummaryHeader << '\n';
      out << "admm_flow," << format_rate_summary(*rep.admm_flow_rate) << '\n';
      out << "aadmm_flow," << format_rate_summary(*rep.aadmm_flow_rate) << '\n';
    }
    write_plot_data(file("plot_data.csv"), rep);

    std::printf("rho=%g  V*=%.6g\n", rho, rep.v_star);
    std::printf("  discrepancy admm vs admm_flow    %.6f\n", *rep.admm_discrepancy);
    std::printf("  discrepancy aadmm vs aadmm_flow  %.6f\n", *rep.aadmm_discrepancy);
    std::printf("  admm_flow  slope %.4f  C %.6g  (window [%g, %g])\n", rep.admm_flow_rate->slope,
                rep.admm_flow_rate->C, args.window_lo, args.window_hi);
    std::printf("  aadmm_flow slope %.4f  C %.6g\n", rep.aadmm_flow_rate->slope,
                rep.aadmm_flow_rate->C);
    std::printf("  decay_ok  admm stab %.4f  admm rate %.4f  aadmm stab %.4f  aadmm rate %.4f\n",
                decay_fraction(rep.admm_stability), decay_fraction(rep.admm_rate),
                decay_fraction(rep.aadmm_stability), decay_fraction(rep.aadmm_rate));
    std::printf("  final V_gap  admm %.6g  aadmm %.6g  admm_flow %.6g  aadmm_flow %.6g\n",
                rep.admm->back().v_gap, rep.aadmm->back().v_gap, rep.admm_flow->back().v_gap,
                rep.aadmm_flow->back().v_gap);

    nlohmann::ordered_json run;
    run["rho"] = rho;
    run["dir"] = fs::relative(dir, args.out_dir).string();
    run["v_star"] = rep.v_star;
    run["admm_discrepancy"] = *rep.admm_discrepancy;
    run["aadmm_discrepancy"] = *rep.aadmm_discrepancy;
    run["admm_flow_slope"] = rep.admm_flow_rate->slope;
    run["aadmm_flow_slope"] = rep.aadmm_flow_rate->slope;
    run["decay_ok_fraction"] = {{"admm_stability", decay_fraction(rep.admm_stability)},
                                {"admm_rate", decay_fraction(rep.admm_rate)},
                                {"aadmm_stability", decay_fraction(rep.aadmm_stability)},
                                {"aadmm_rate", decay_fraction(rep.aadmm_rate)}};
    index["runs"].push_back(run);
  }

  if (rhos.size() > 1) {
    std::ofstream sweep((fs::path(args.out_dir) / "sweep.csv").string(), std::ios::binary);
    sweep << "rho,admm_discrepancy,aadmm_discrepancy\n";
    for (const auto& run : index["runs"]) {
      sweep << detail::format_double(run["rho"].get<double>()) << ','
            << detail::format_double(run["admm_discrepancy"].get<double>()) << ','
            << detail::format_double(run["aadmm_discrepancy"].get<double>()) << '\n';
    }
  }
  std::ofstream idx((fs::path(args.out_dir) / "report.json").string(), std::ios::binary);
  idx << index.dump(2) << '\n';
  std::printf("report written to %s\n", (fs::path(args.out_dir) / "report.json").string().c_str());
  return kExitOk;
}

struct RatesArgs {
  std::string csv;
  double v_star_shift = 0.0;
  double target = -1.0;
  double tol = 0.0;
  double window_lo = 2.0;
  double window_hi = 20.0;
};

int cmd_rates(const RatesArgs& args) {
  GapSeries series = read_gap_series(args.csv);
  for (double& g : series.gap) g -= args.v_star_shift;
  const RateFit fit = fit_rate(std::span<const double>(series.t),
                               std::span<const double>(series.gap),
                               {args.window_lo, args.window_hi}, args.target);
  std::printf("%s\n%s\n", kRateSummaryHeader, format_rate_summary(fit).c_str());
  if (fit.slope <= args.target + args.tol) return kExitOk;
  std::fprintf(stderr, "rates: slope %.6f exceeds target %.6f + tol %.6f\n", fit.slope,
               args.target, args.tol);
  return kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADMM, accelerated ADMM and their continuous-time flows"};
  app.footer(kCsvHelp);
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random split problem and write it as JSON");
  gen_cmd->add_option("--n", gen.params.n, "Dimension of x")->capture_default_str();
  gen_cmd->add_option("--m", gen.params.m, "Rows of A (0: square)")->capture_default_str();
  gen_cmd->add_option("--zero-eigs", gen.params.zero_eigs, "Number of zero eigenvalues of M")
      ->capture_default_str();
  gen_cmd->add_option("--eig-hi", gen.params.eig_hi, "Upper end of the nonzero spectrum of M")
      ->capture_default_str();
  gen_cmd->add_option("--cond-a", gen.params.cond_A, "Condition number of A")->capture_default_str();
  gen_cmd->add_option("--seed", gen.params.seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output problem file")->capture_default_str();

  RunArgs run;
  run.out_dir = default_out_dir();
  auto* run_cmd = app.add_subcommand("run", "Run solvers and/or flows on a problem file");
  run_cmd->set_help_flag("--help", "Print this help message and exit");  // -h is taken by --h
  run_cmd->add_option("--problem", run.problem, "Problem file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--solver", run.solvers, "admm | aadmm | admm_flow | aadmm_flow (repeatable)")
      ->check(CLI::IsMember({"admm", "aadmm", "admm_flow", "aadmm_flow"}));
  run_cmd->add_option("--rho", run.rho, "Penalty parameter")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--r", run.r, "Damping parameter (>= 3)")->capture_default_str()->check(CLI::Range(3.0, 1e300));
  run_cmd->add_option("--h", run.h, "Flow step size (default 1e-3 rk4, 1e-2 symplectic)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--t0", run.t0, "Flow start time (default 0 rk4, h symplectic)");
  run_cmd->add_option("--t-end", run.t_end, "Flow end time (default max_iter times the time scale)");
  run_cmd->add_option("--max-iter", run.max_iter, "Discrete iteration budget")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--stop-tol", run.stop_tol, "Residual stopping tolerance (0: full budget)")->capture_default_str();
  run_cmd->add_option("--x0", run.x0, "Initial point x0 = value * (1, ..., 1)")->capture_default_str();
  run_cmd->add_option("--integrator", run.integrator, "rk4 | symplectic")
      ->check(CLI::IsMember({"rk4", "symplectic"}));
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->capture_default_str();

  Figure1Args fig;
  fig.out_dir = default_out_dir();
  auto* fig_cmd = app.add_subcommand("figure1", "Reproduce the paired discrete/continuous experiment");
  fig_cmd->add_option("--seed", fig.params.seed, "Problem seed")->capture_default_str();
  fig_cmd->add_option("--rho", fig.rhos, "Penalty parameter(s); repeat for a sweep (default 50)")
      ->check(CLI::PositiveNumber);
  fig_cmd->add_option("--r", fig.r, "Damping parameter (>= 3)")->capture_default_str()->check(CLI::Range(3.0, 1e300));
  fig_cmd->add_option("--max-iter", fig.max_iter, "Discrete iteration budget")->capture_default_str()->check(CLI::PositiveNumber);
  fig_cmd->add_option("--h-rk4", fig.h_rk4, "RK4 step")->capture_default_str()->check(CLI::PositiveNumber);
  fig_cmd->add_option("--h-symplectic", fig.h_symplectic, "Symplectic Euler step")->capture_default_str()->check(CLI::PositiveNumber);
  fig_cmd->add_option("--t0", fig.t0, "Second-order flow start time (default: its step)");
  fig_cmd->add_option("--x0", fig.x0, "Initial point x0 = value * (1, ..., 1)")->capture_default_str();
  fig_cmd->add_option("--window-lo", fig.window_lo, "Rate-fit window start")->capture_default_str();
  fig_cmd->add_option("--window-hi", fig.window_hi, "Rate-fit window end")->capture_default_str();
  fig_cmd->add_option("--out-dir", fig.out_dir, "Output directory")->capture_default_str();

  RatesArgs rates;
  auto* rates_cmd = app.add_subcommand("rates", "Fit log-log slope of V_gap against t from a trajectory CSV");
  rates_cmd->add_option("--csv", rates.csv, "Trajectory CSV with t and V_gap columns")->required()->check(CLI::ExistingFile);
  rates_cmd->add_option("--v-star-shift", rates.v_star_shift,
                        "Subtract this from V_gap (use when the CSV was written against a different V*)")
      ->capture_default_str();
  rates_cmd->add_option("--target", rates.target, "Target slope (e.g. -1 or -2)")->capture_default_str();
  rates_cmd->add_option("--tol", rates.tol, "Pass iff slope <= target + tol")->capture_default_str();
  rates_cmd->add_option("--window-lo", rates.window_lo, "Fit window start")->capture_default_str();
  rates_cmd->add_option("--window-hi", rates.window_hi, "Fit window end")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*run_cmd) return cmd_run(run);
    if (*fig_cmd) return cmd_figure1(fig);
    if (*rates_cmd) return cmd_rates(rates);
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDiverged;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
  return kExitUsage;
}
