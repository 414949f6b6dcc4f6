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

// The paired discrete/continuous experiment: ADMM against the RK4-integrated
// ADMM flow and A-ADMM against the symplectic-Euler A-ADMM flow, on a shared
// problem and initial point, followed by monitors, rate fits and the
// discrete-vs-flow discrepancy.

#ifndef ADMMFLOW_EXPERIMENT_HPP_
#define ADMMFLOW_EXPERIMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "admmflow/analysis.hpp"
#include "admmflow/discrete.hpp"
#include "admmflow/errors.hpp"
#include "admmflow/flows.hpp"
#include "admmflow/problem.hpp"
#include "admmflow/trajectory.hpp"

namespace admmflow {

struct ExperimentConfig {
  std::set<Method> methods{Method::kAdmm, Method::kAccAdmm, Method::kAdmmFlow,
                           Method::kAccAdmmFlow};
  double rho = 50.0;
  double r = 10.0;
  double h_rk4 = kDefaultRk4Step;
  double h_symplectic = kDefaultSymplecticStep;
  std::optional<double> t0;     // second-order flow; defaults to its step size
  std::optional<double> t_end;  // defaults to max_iter times the method's time scale
  std::int64_t max_iter = 300;
  double x0_fill = 5.0;         // x0 = x0_fill * (1, ..., 1)
  RateWindow rate_window{2.0, 20.0};
  bool parallel = true;

  void validate() const {
    if (methods.empty()) throw InvalidArgument("experiment: select at least one method");
    if (!(rho > 0.0)) throw InvalidArgument("experiment: rho must be positive");
    const bool accelerated =
        methods.count(Method::kAccAdmm) != 0 || methods.count(Method::kAccAdmmFlow) != 0;
    if (accelerated && !(r >= 3.0)) {
      throw InvalidArgument("experiment: r must be >= 3 for accelerated methods");
    }
    if (max_iter < 1) throw InvalidArgument("experiment: max_iter must be >= 1");
  }

  /// t = k / rho for ADMM, t = k / sqrt(rho) for A-ADMM.
  double time_scale(bool accelerated) const {
    return accelerated ? 1.0 / std::sqrt(rho) : 1.0 / rho;
  }
};

/// Flow horizon that covers the discrete run and, when `cover_window`, the
/// rate-fit window.
inline double flow_horizon(const ExperimentConfig& config, bool accelerated, bool cover_window) {
  if (config.t_end) return *config.t_end;
  double t_end = static_cast<double>(config.max_iter) * config.time_scale(accelerated);
  if (cover_window) t_end = std::max(t_end, config.rate_window.hi);
  return t_end;
}

struct MethodRun {
  Method method;
  Trajectory trajectory;
};

/// Runs one method of the experiment.
inline Trajectory run_method(const SplitProblem& problem, const ExperimentConfig& config,
                             Method method, double v_star, bool cover_window = false) {
  const Vector x0 = Vector::Constant(problem.n(), config.x0_fill);
  switch (method) {
    case Method::kAdmm:
    case Method::kAccAdmm: {
      SolverOptions opt;
      opt.rho = config.rho;
      opt.max_iter = config.max_iter;
      opt.v_star = v_star;
      if (method == Method::kAccAdmm) opt.r = config.r;
      return run_solver(problem, x0, opt);
    }
    case Method::kAdmmFlow: {
      IntegratorConfig ic;
      ic.h = config.h_rk4;
      ic.t0 = 0.0;
      ic.t_end = flow_horizon(config, false, cover_window);
      return rk4_integrate(problem, x0, ic, v_star);
    }
    case Method::kAccAdmmFlow: {
      IntegratorConfig ic;
      ic.h = config.h_symplectic;
      ic.t0 = config.t0.value_or(config.h_symplectic);
      ic.t_end = flow_horizon(config, true, cover_window);
      ic.r = config.r;
      return aadmm_flow_integrate(problem, x0, ic, v_star);
    }
  }
  throw InvalidArgument("run_method: unknown method");
}

struct Figure1Report {
  double rho = 0.0;
  double v_star = 0.0;
  Vector x_star;
  std::optional<Trajectory> admm, aadmm, admm_flow, aadmm_flow;
  std::optional<double> admm_discrepancy;   // ADMM vs ADMM flow
  std::optional<double> aadmm_discrepancy;  // A-ADMM vs A-ADMM flow
  std::optional<RateFit> admm_flow_rate;    // target slope -1
  std::optional<RateFit> aadmm_flow_rate;   // target slope -2
  std::vector<LyapunovSample> admm_stability, admm_rate, aadmm_stability, aadmm_rate;
};

/// Failure of one method, naming it.
class MethodFailure : public Error {
 public:
  MethodFailure(Method m, const std::string& what, bool diverged)
      : Error(std::string(method_name(m)) + ": " + what), method_(m), diverged_(diverged) {}
  Method method() const noexcept { return method_; }
  bool diverged() const noexcept { return diverged_; }

 private:
  Method method_;
  bool diverged_;
};

/// Runs the selected methods (concurrently when config.parallel), then the
/// monitors, rate fits and discrepancies that apply to them.
inline Figure1Report run_experiment(const SplitProblem& problem, const ExperimentConfig& config) {
  config.validate();
  Figure1Report report;
  report.rho = config.rho;
  const Minimizer opt = optimal_value(problem);
  report.v_star = opt.value;
  report.x_star = opt.x;

  std::vector<Method> methods(config.methods.begin(), config.methods.end());
  std::vector<std::future<Trajectory>> futures;
  for (Method m : methods) {
    const auto policy = config.parallel ? std::launch::async : std::launch::deferred;
    futures.push_back(std::async(policy, [&problem, &config, m, v = opt.value] {
      return run_method(problem, config, m, v, /*cover_window=*/true);
    }));
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    Trajectory traj;
    try {
      traj = futures[i].get();
    } catch (const DivergenceError& e) {
      throw MethodFailure(methods[i], e.what(), true);
    } catch (const Error& e) {
      throw MethodFailure(methods[i], e.what(), false);
    }
    switch (methods[i]) {
      case Method::kAdmm: report.admm = std::move(traj); break;
      case Method::kAccAdmm: report.aadmm = std::move(traj); break;
      case Method::kAdmmFlow: report.admm_flow = std::move(traj); break;
      case Method::kAccAdmmFlow: report.aadmm_flow = std::move(traj); break;
    }
  }

  if (report.admm && report.admm_flow) {
    report.admm_discrepancy = curve_discrepancy(*report.admm, *report.admm_flow);
  }
  if (report.aadmm && report.aadmm_flow) {
    report.aadmm_discrepancy = curve_discrepancy(*report.aadmm, *report.aadmm_flow);
  }
  if (report.admm_flow) {
    report.admm_flow_rate = fit_rate(*report.admm_flow, report.v_star, config.rate_window, -1.0);
    report.admm_stability = monitor_admm_stability(problem, *report.admm_flow, report.x_star);
    report.admm_rate = monitor_admm_rate(problem, *report.admm_flow, report.x_star);
  }
  if (report.aadmm_flow) {
    report.aadmm_flow_rate = fit_rate(*report.aadmm_flow, report.v_star, config.rate_window, -2.0);
    report.aadmm_stability =
        monitor_aadmm_stability(problem, *report.aadmm_flow, report.x_star, config.r);
    report.aadmm_rate = monitor_aadmm_rate(problem, *report.aadmm_flow, report.x_star, config.r);
  }
  return report;
}

}  // namespace admmflow

#endif  // ADMMFLOW_EXPERIMENT_HPP_
