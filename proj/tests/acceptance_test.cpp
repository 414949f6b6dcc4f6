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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

namespace admmflow {
namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

Outcome gradient_oracle() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = testing::random_quadratic_problem(5, 7, rng);
    for (int k = 0; k < 20; ++k) {
      const Vector x = testing::random_vector(5, rng, 2.0);
      const Vector fd = testing::central_difference_gradient(
          [&p](const Vector& v) { return eval_V(p, v); }, x, 1e-5);
      worst = std::max(worst, (grad_V(p, x) - fd).norm() / std::max(1.0, fd.norm()));
    }
  }
  return {worst <= 1e-6, fmt("max relative error %.3g (limit 1e-6)", worst)};
}

double rk4_error(double h) {
  const auto p = testing::scalar_problem(1.0, 0.0, 0.0, 1.0);
  IntegratorConfig c;
  c.h = h;
  c.t_end = 1.0;
  return std::abs(rk4_integrate(p, testing::vec1(1.0), c).back().x(0) - std::exp(-1.0));
}

Outcome rk4_closed_form() {
  const double e1 = rk4_error(0.01), e2 = rk4_error(0.005);
  return {e1 <= 1e-8 && e1 / e2 >= 12.0,
          fmt("|X(1)-1/e| = %.3g", e1) + fmt(", halving ratio %.2f (need >= 12)", e1 / e2)};
}

/// Figure-1 experiment per rho, shared by criteria 3 and 4.
std::map<double, Figure1Report>& sweep() {
  static std::map<double, Figure1Report> reports = [] {
    std::map<double, Figure1Report> out;
    const auto p = testing::default_figure1_problem();
    for (double rho : {10.0, 50.0, 200.0}) {
      ExperimentConfig cfg;
      cfg.rho = rho;
      cfg.methods = {Method::kAdmm, Method::kAccAdmm, Method::kAdmmFlow, Method::kAccAdmmFlow};
      out.emplace(rho, run_experiment(p, cfg));
    }
    return out;
  }();
  return reports;
}

Outcome limit_check(bool accelerated, double threshold) {
  const auto& s = sweep();
  auto disc = [&](double rho) {
    const auto& rep = s.at(rho);
    return accelerated ? *rep.aadmm_discrepancy : *rep.admm_discrepancy;
  };
  const double d10 = disc(10.0), d50 = disc(50.0), d200 = disc(200.0);
  const bool monotone = d10 > d50 && d50 > d200;
  std::ostringstream ss;
  ss << "discrepancy rho=10: " << fmt("%.4f", d10) << ", rho=50: " << fmt("%.4f", d50)
     << ", rho=200: " << fmt("%.4f", d200) << (monotone ? " (decreasing)" : " (NOT decreasing)")
     << "; limit at rho=50: " << threshold
     << (accelerated ? "; runtime counted under criterion 3 (shared sweep)" : "");
  return {monotone && d50 <= threshold, ss.str()};
}

Outcome flow_rate(Method method, double target, double limit) {
  const auto p = testing::default_figure1_problem();
  ExperimentConfig cfg;
  const auto traj = run_method(p, cfg, method, 0.0, /*cover_window=*/true);
  const auto fit = fit_rate(traj, 0.0, {2.0, 20.0}, target);
  return {fit.slope <= limit,
          fmt("slope %.4f", fit.slope) + fmt(" over [2, 20] (limit %.2f)", limit) +
              fmt(", C %.4g", fit.C)};
}

Outcome lyapunov_monotonicity() {
  const auto p = testing::default_figure1_problem();
  ExperimentConfig cfg;
  const Vector xs = Vector::Zero(p.n());
  const auto first = run_method(p, cfg, Method::kAdmmFlow, 0.0, true);
  const auto second = run_method(p, cfg, Method::kAccAdmmFlow, 0.0, true);
  const double f_stab = decay_fraction(monitor_admm_stability(p, first, xs));
  const double f_rate = decay_fraction(monitor_admm_rate(p, first, xs));
  const double s_stab = decay_fraction(monitor_aadmm_stability(p, second, xs, cfg.r));
  const auto eta_series = monitor_aadmm_rate(p, second, xs, cfg.r);
  const double s_rate = decay_fraction(eta_series);
  double eta_worst = 0.0;
  for (const auto& s : eta_series) eta_worst = std::max(eta_worst, s.residual);
  const bool ok = f_stab >= 0.99 && f_rate >= 0.99 && s_stab >= 0.99 && s_rate >= 0.99 &&
                  eta_worst <= 1e-12;
  std::ostringstream ss;
  ss << "decay_ok: first-order stability " << fmt("%.4f", f_stab) << ", first-order rate "
     << fmt("%.4f", f_rate) << ", second-order stability " << fmt("%.4f", s_stab)
     << ", eta-weighted " << fmt("%.4f", s_rate) << "; eta identity max residual "
     << fmt("%.2g", eta_worst);
  return {ok, ss.str()};
}

Outcome strong_convexity() {
  Matrix M(2, 2);
  M << 2.0, 0.5, 0.5, 1.0;
  Matrix A(2, 2);
  A << 1.0, 0.2, 0.0, 1.5;
  const SplitProblem p(QuadraticFunction(M, Vector::Zero(2)), QuadraticFunction::zero(2), A);
  IntegratorConfig c;
  c.h = 1e-2;
  c.t0 = 1e-2;
  c.t_end = 100.0;
  c.r = 10.0;
  const auto traj = aadmm_flow_integrate(p, Vector::Constant(2, 5.0), c);
  const auto rep = check_state_convergence(p, traj, optimal_value(p).x, 0.5);
  const double dist = rep.final_distance / rep.initial_distance;
  const double speed = rep.final_speed / rep.max_speed;
  return {rep.converged && dist <= 1e-3 && speed <= 1e-3,
          fmt("||X-x*|| ratio %.3g", dist) + fmt(", ||X'|| ratio %.3g", speed) +
              (rep.converged ? ", envelopes decreasing" : ", envelopes NOT decreasing")};
}

Outcome reductions() {
  std::mt19937_64 rng(103);
  const SplitProblem p(QuadraticFunction(testing::random_psd(4, 2, rng), Vector::Zero(4)),
                       QuadraticFunction::zero(4), Matrix::Identity(4, 4));
  double rhs_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vector x = testing::random_vector(4, rng, 3.0);
    rhs_err = std::max(rhs_err, (admm_flow_rhs(p, x) + grad_V(p, x)).cwiseAbs().maxCoeff());
  }

  // X'' + (r/t) X' + grad V(X) = 0 by RK4 at a fine step.
  const double r = 3.0, t0 = 0.5, t_end = 4.0;
  const Vector x0 = Vector::Constant(4, 1.0);
  const Matrix M = p.f().quadratic()->hessian();
  const auto ref = testing::rk4_second_order(
      [&](double t, const Vector& x, const Vector& v) -> Vector { return -(r / t) * v - M * x; },
      t0, x0, Vector::Zero(4), 1e-4, 35000);
  std::vector<double> diffs;
  for (double h : {0.02, 0.01, 0.005}) {
    IntegratorConfig c;
    c.h = h;
    c.t0 = t0;
    c.t_end = t_end;
    c.r = r;
    const auto traj = aadmm_flow_integrate(p, x0, c, 0.0);
    const auto stride = static_cast<std::size_t>(std::llround(0.02 / h));
    double worst = 0.0;
    for (std::size_t i = 0, j = 0; i < traj.size() && j < ref.size(); i += stride, j += 200) {
      worst = std::max(worst, (traj.samples[i].x - ref[j].x).cwiseAbs().maxCoeff());
    }
    diffs.push_back(worst);
  }
  const bool ok = rhs_err <= 1e-12 && diffs[1] < diffs[0] && diffs[2] < diffs[1];
  std::ostringstream ss;
  ss << "rhs + grad V max " << fmt("%.2g", rhs_err) << "; sup |X - X_ref| at h=0.02/0.01/0.005: "
     << fmt("%.3g", diffs[0]) << " / " << fmt("%.3g", diffs[1]) << " / " << fmt("%.3g", diffs[2]);
  return {ok, ss.str()};
}

std::string csv_of(const Trajectory& t) {
  std::ostringstream out;
  write_trajectory_csv(out, t);
  return out.str();
}

Outcome fixed_point_and_determinism() {
  std::mt19937_64 rng(107);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = testing::random_quadratic_problem(5, 7, rng);
    const double rho = 2.0;
    const Vector x = optimal_value(p).x;
    const Vector z = p.A() * x;
    const Vector u = p.g().gradient(z) / rho;
    const auto a = admm_step(p, AdmmState{x, z, u, 3, rho});
    AccAdmmState s = initial_aadmm_state(p, x, rho, 10.0);
    s.u = s.u_prev = s.u_hat = u;
    s.k = 3;
    const auto b = aadmm_step(p, s);
    const double scale = 1.0 + x.norm() + u.norm();
    worst = std::max({worst, (a.x - x).norm() / scale, (a.z - z).norm() / scale,
                      (a.u - u).norm() / scale, (b.x - x).norm() / scale,
                      (b.z_hat - z).norm() / scale, (b.u_hat - u).norm() / scale});
  }

  auto artifacts = [] {
    const auto p = testing::default_figure1_problem();
    ExperimentConfig cfg;
    cfg.max_iter = 50;
    cfg.parallel = false;
    std::string all = problem_to_json(p).dump(2);
    for (Method m : {Method::kAdmm, Method::kAccAdmm, Method::kAdmmFlow, Method::kAccAdmmFlow}) {
      all += csv_of(run_method(p, cfg, m, 0.0));
    }
    return all;
  };
  const bool identical = artifacts() == artifacts();
  return {worst <= 1e-9 && identical,
          fmt("max fixed-point drift %.2g (limit 1e-9)", worst) +
              (identical ? ", repeated runs byte-identical" : ", repeated runs DIFFER")};
}

}  // namespace
}  // namespace admmflow

int main() {
  using namespace admmflow;
  const std::vector<Criterion> criteria = {
      {1, "gradient oracle", 1.0, gradient_oracle},
      {2, "closed-form 1-D flow", 1.0, rk4_closed_form},
      {3, "ADMM vs ADMM flow limit", 30.0, [] { return limit_check(false, 0.15); }},
      {4, "A-ADMM vs A-ADMM flow limit", 30.0, [] { return limit_check(true, 0.2); }},
      {5, "ADMM flow O(1/t) rate", 10.0, [] { return flow_rate(Method::kAdmmFlow, -1.0, -0.9); }},
      {6, "A-ADMM flow O(1/t^2) rate", 10.0,
       [] { return flow_rate(Method::kAccAdmmFlow, -2.0, -1.7); }},
      {7, "Lyapunov monotonicity", 10.0, lyapunov_monotonicity},
      {8, "strongly convex state convergence", 5.0, strong_convexity},
      {9, "reduction checks", 5.0, reductions},
      {10, "fixed points and determinism", 60.0, fixed_point_and_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit;
    const bool pass = o.ok && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.time_limit, in_time ? "" : " TIME EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
