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

// Continuous-time limits of the two ADMM variants.
//
//   ADMM flow:    (A^T A) X'  + grad V(X) = 0,                 X(0) = x0
//   A-ADMM flow:  (A^T A)(X'' + (r/t) X') + grad V(X) = 0,     X(0) = x0, X'(0) = 0
//
// The first-order flow is integrated with classical RK4. The second-order
// flow is integrated in Hamiltonian form,
//
//   H(X, P, t) = 1/2 e^{-xi(t)} <P, (A^T A)^{-1} P> + e^{xi(t)} V(X),  xi = r log t,
//
// with symplectic Euler (momentum first, then position).

#ifndef ADMMFLOW_FLOWS_HPP_
#define ADMMFLOW_FLOWS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "admmflow/errors.hpp"
#include "admmflow/problem.hpp"
#include "admmflow/trajectory.hpp"

namespace admmflow {

struct FirstOrderFlowState {
  double t = 0.0;
  Vector X;
};

/// Z(t) = A X(t) on the flow.
inline Vector flow_z(const SplitProblem& problem, const FirstOrderFlowState& s) {
  return problem.A() * s.X;
}

struct SecondOrderFlowState {
  double t = 1.0;
  Vector X;
  Vector P;  // canonical momentum e^{xi} (A^T A) X'
};

struct IntegratorConfig {
  double h = 1e-3;
  double t0 = 0.0;
  double t_end = 1.0;
  double r = 10.0;  // second-order flow only
};

inline constexpr double kDefaultRk4Step = 1e-3;
inline constexpr double kDefaultSymplecticStep = 1e-2;

/// xi(t) = r log t.
inline double damping_exponent(double t, double r) {
  if (!(t > 0.0)) throw InvalidArgument("damping_exponent: t must be positive");
  return r * std::log(t);
}

/// X' = e^{-xi(t)} (A^T A)^{-1} P.
inline Vector flow_velocity(const SplitProblem& problem, const SecondOrderFlowState& s, double r) {
  return std::exp(-damping_exponent(s.t, r)) * problem.gram_solve(s.P);
}

/// -(A^T A)^{-1} grad V(X). Reduces to -grad V(X) when A = I.
inline Vector admm_flow_rhs(const SplitProblem& problem, const Vector& X) {
  return -problem.gram_solve(grad_V(problem, X));
}

/// Right-hand side of the first-order system for Y = (X, X'):
///   Y1' = Y2,  Y2' = -(r/t) Y2 - (A^T A)^{-1} grad V(Y1).
inline std::pair<Vector, Vector> aadmm_flow_first_order_rhs(const SplitProblem& problem, double t,
                                                           const Vector& Y1, const Vector& Y2,
                                                           double r) {
  if (!(t > 0.0)) throw InvalidArgument("aadmm_flow_first_order_rhs: t must be positive");
  return {Y2, -(r / t) * Y2 + admm_flow_rhs(problem, Y1)};
}

namespace detail {

inline void check_config(const IntegratorConfig& c, bool second_order) {
  if (!(c.h > 0.0) || !std::isfinite(c.h)) throw InvalidArgument("integrator: h must be positive");
  if (second_order ? !(c.t0 > 0.0) : !(c.t0 >= 0.0)) {
    throw InvalidArgument(second_order ? "integrator: t0 must be > 0 for the second-order flow"
                                       : "integrator: t0 must be >= 0");
  }
  if (!(c.t_end > c.t0) || !std::isfinite(c.t_end)) {
    throw InvalidArgument("integrator: t_end must exceed t0");
  }
  if (c.h > (c.t_end - c.t0) * (1.0 + 1e-12)) {
    throw InvalidArgument("integrator: h exceeds the integration window");
  }
  if (second_order && !(c.r >= 3.0)) throw InvalidArgument("integrator: r must be >= 3");
}

/// Fixed-step count with a shortened last step when (t_end - t0) / h is not
/// integral. Returns the time after step i (1-based).
inline std::int64_t step_count(const IntegratorConfig& c) {
  const double ratio = (c.t_end - c.t0) / c.h;
  return static_cast<std::int64_t>(std::ceil(ratio - 1e-9));
}

inline double step_time(const IntegratorConfig& c, std::int64_t i, std::int64_t steps) {
  return i == steps ? c.t_end : c.t0 + static_cast<double>(i) * c.h;
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta on the ADMM flow, sampled every step.
inline Trajectory rk4_integrate(const SplitProblem& problem, const Vector& x0,
                                const IntegratorConfig& config,
                                std::optional<double> v_star = std::nullopt) {
  detail::check_dim(problem, x0, "rk4_integrate");
  detail::check_config(config, /*second_order=*/false);
  Trajectory traj;
  traj.method = Method::kAdmmFlow;
  traj.v_star = detail::resolve_v_star(problem, v_star);
  const std::int64_t steps = detail::step_count(config);
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  const auto start = std::chrono::steady_clock::now();
  auto record = [&](std::int64_t i, double t, const Vector& X) {
    Sample s;
    s.k = i;
    s.t = t;
    s.x = X;
    s.v_gap = eval_V(problem, X) - traj.v_star;
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    traj.samples.push_back(std::move(s));
  };

  Vector X = x0;
  double t = config.t0;
  record(0, t, X);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double t_next = detail::step_time(config, i, steps);
    const double h = t_next - t;
    const Vector k1 = admm_flow_rhs(problem, X);
    const Vector k2 = admm_flow_rhs(problem, X + 0.5 * h * k1);
    const Vector k3 = admm_flow_rhs(problem, X + 0.5 * h * k2);
    const Vector k4 = admm_flow_rhs(problem, X + h * k3);
    Vector next = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
      throw TrajectoryDivergence("admm_flow: non-finite state after t=" + std::to_string(t) +
                                     "; reduce --h",
                                 traj);
    }
    X = std::move(next);
    t = t_next;
    record(i, t, X);
  }
  return traj;
}

/// H = 1/2 e^{-xi} <P, (A^T A)^{-1} P> + e^{xi} V(X).
inline double hamiltonian_energy(const SplitProblem& problem, const SecondOrderFlowState& s,
                                 double r) {
  if (!(s.t > 0.0)) throw InvalidArgument("hamiltonian_energy: t must be positive");
  const double xi = damping_exponent(s.t, r);
  return 0.5 * std::exp(-xi) * s.P.dot(problem.gram_solve(s.P)) +
         std::exp(xi) * eval_V(problem, s.X);
}

/// p+ = p - h e^{xi(t)} grad V(x);  x+ = x + h e^{-xi(t)} (A^T A)^{-1} p+;  t+ = t + h.
/// Both exponentials use the pre-step time.
inline SecondOrderFlowState symplectic_euler_step(const SplitProblem& problem,
                                                  const SecondOrderFlowState& s, double h,
                                                  double r) {
  if (!(s.t > 0.0)) throw InvalidArgument("symplectic_euler_step: t must be positive");
  const double xi = damping_exponent(s.t, r);
  SecondOrderFlowState next;
  next.P = s.P - h * std::exp(xi) * grad_V(problem, s.X);
  next.X = s.X + h * std::exp(-xi) * problem.gram_solve(next.P);
  next.t = s.t + h;
  if (!next.X.allFinite() || !next.P.allFinite()) {
    throw DivergenceError("symplectic_euler_step: non-finite state after t=" + std::to_string(s.t),
                          s.t);
  }
  return next;
}

/// Integrates the A-ADMM flow from X(t0) = x0, P(t0) = 0 with symplectic Euler.
inline Trajectory aadmm_flow_integrate(const SplitProblem& problem, const Vector& x0,
                                       const IntegratorConfig& config,
                                       std::optional<double> v_star = std::nullopt) {
  detail::check_dim(problem, x0, "aadmm_flow_integrate");
  detail::check_config(config, /*second_order=*/true);
  Trajectory traj;
  traj.method = Method::kAccAdmmFlow;
  traj.v_star = detail::resolve_v_star(problem, v_star);
  const std::int64_t steps = detail::step_count(config);
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  const auto start = std::chrono::steady_clock::now();
  auto record = [&](std::int64_t i, const SecondOrderFlowState& st) {
    Sample s;
    s.k = i;
    s.t = st.t;
    s.x = st.X;
    s.xdot = flow_velocity(problem, st, config.r);
    s.v_gap = eval_V(problem, st.X) - traj.v_star;
    s.hamiltonian = hamiltonian_energy(problem, st, config.r);
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    traj.samples.push_back(std::move(s));
  };

  SecondOrderFlowState st{config.t0, x0, Vector::Zero(problem.n())};
  record(0, st);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double t_next = detail::step_time(config, i, steps);
    try {
      st = symplectic_euler_step(problem, st, t_next - st.t, config.r);
    } catch (const DivergenceError& e) {
      throw TrajectoryDivergence(std::string("aadmm_flow: ") + e.what() + "; reduce --h", traj);
    }
    st.t = t_next;  // pin the grid against accumulated rounding
    record(i, st);
  }
  return traj;
}

}  // namespace admmflow

#endif  // ADMMFLOW_FLOWS_HPP_
