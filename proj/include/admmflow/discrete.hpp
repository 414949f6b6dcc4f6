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

// Scaled ADMM and its Nesterov-type accelerated variant (A-ADMM).
//
//   x+ = argmin_x f(x) + rho/2 ||A x - z + u||^2
//   z+ = argmin_z g(z) + rho/2 ||A x+ - z + u||^2
//   u+ = u + A x+ - z+
//
// A-ADMM runs the same three updates on the extrapolated pair (z_hat, u_hat)
// and then extrapolates with gamma_{k+1} = k / (k + r).

#ifndef ADMMFLOW_DISCRETE_HPP_
#define ADMMFLOW_DISCRETE_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "admmflow/errors.hpp"
#include "admmflow/problem.hpp"
#include "admmflow/trajectory.hpp"

namespace admmflow {

struct AdmmState {
  Vector x;
  Vector z;
  Vector u;  // scaled dual
  std::int64_t k = 0;
  double rho = 1.0;
};

struct AccAdmmState {
  Vector x;
  Vector z;
  Vector u;
  Vector z_prev;
  Vector u_prev;
  Vector z_hat;
  Vector u_hat;
  std::int64_t k = 0;
  double rho = 1.0;
  double r = 3.0;
};

/// gamma_{k+1} = k / (k + r), evaluated with the counter before the increment.
inline double momentum_coefficient(std::int64_t k, double r) {
  return static_cast<double>(k) / (static_cast<double>(k) + r);
}

/// A smooth convex subproblem handed to the inner-solver hook.
struct SubproblemObjective {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// Minimizes a subproblem from a warm start to the requested gradient-norm
/// tolerance. Required only when f or g is a callback term.
using InnerMinimizer =
    std::function<Vector(const SubproblemObjective&, const Vector& warm_start, double tol)>;

inline constexpr double kSubproblemTolerance = 1e-10;

inline AdmmState initial_admm_state(const SplitProblem& problem, const Vector& x0, double rho) {
  detail::check_dim(problem, x0, "initial_admm_state");
  if (!(rho > 0.0)) throw InvalidArgument("ADMM: rho must be positive");
  AdmmState s;
  s.x = x0;
  s.z = problem.A() * x0;
  s.u = Vector::Zero(problem.m());
  s.rho = rho;
  return s;
}

inline AccAdmmState initial_aadmm_state(const SplitProblem& problem, const Vector& x0, double rho,
                                        double r) {
  detail::check_dim(problem, x0, "initial_aadmm_state");
  if (!(rho > 0.0)) throw InvalidArgument("A-ADMM: rho must be positive");
  if (!(r >= 3.0)) throw InvalidArgument("A-ADMM: damping r must be >= 3");
  AccAdmmState s;
  s.x = x0;
  s.z = problem.A() * x0;
  s.u = Vector::Zero(problem.m());
  s.z_prev = s.z;
  s.u_prev = s.u;
  s.z_hat = s.z;
  s.u_hat = s.u;
  s.rho = rho;
  s.r = r;
  return s;
}

/// Both ADMM variants at a fixed penalty. The two subproblem matrices
/// (M_f + rho A^T A and M_g + rho I) are factored once at construction.
class AdmmSolver {
 public:
  AdmmSolver(SplitProblem problem, double rho, InnerMinimizer inner = {})
      : problem_(std::move(problem)), rho_(rho), inner_(std::move(inner)) {
    if (!(rho_ > 0.0) || !std::isfinite(rho_)) {
      throw InvalidArgument("AdmmSolver: rho must be positive and finite");
    }
    const Matrix& A = problem_.A();
    if (const auto* f = problem_.f().quadratic()) {
      x_system_ = f->hessian() + rho_ * (A.transpose() * A);
      x_llt_.compute(x_system_);
      if (x_llt_.info() != Eigen::Success) {
        throw NumericalFailure("AdmmSolver: x-subproblem matrix is not positive definite");
      }
    }
    if (const auto* g = problem_.g().quadratic()) {
      z_system_ = g->hessian();
      z_system_.diagonal().array() += rho_;
      z_llt_.compute(z_system_);
      if (z_llt_.info() != Eigen::Success) {
        throw NumericalFailure("AdmmSolver: z-subproblem matrix is not positive definite");
      }
    }
  }

  const SplitProblem& problem() const noexcept { return problem_; }
  double rho() const noexcept { return rho_; }

  /// argmin_x f(x) + rho/2 ||A x - c||^2 with c = z - u.
  Vector solve_x(const Vector& c, const Vector& warm_start) const {
    const Matrix& A = problem_.A();
    if (const auto* f = problem_.f().quadratic()) {
      const Vector rhs = rho_ * (A.transpose() * c) - f->linear();
      return checked_solve(x_llt_, x_system_, rhs, "x");
    }
    SubproblemObjective sub;
    sub.dim = problem_.n();
    sub.value = [this, c](const Vector& x) {
      return problem_.f().value(x) + 0.5 * rho_ * (problem_.A() * x - c).squaredNorm();
    };
    sub.gradient = [this, c](const Vector& x) -> Vector {
      return problem_.f().gradient(x) + rho_ * (problem_.A().transpose() * (problem_.A() * x - c));
    };
    return run_inner(sub, warm_start, "x");
  }

  /// argmin_z g(z) + rho/2 ||z - w||^2 with w = A x+ + u.
  Vector solve_z(const Vector& w, const Vector& warm_start) const {
    if (const auto* g = problem_.g().quadratic()) {
      const Vector rhs = rho_ * w - g->linear();
      return checked_solve(z_llt_, z_system_, rhs, "z");
    }
    SubproblemObjective sub;
    sub.dim = problem_.m();
    sub.value = [this, w](const Vector& z) {
      return problem_.g().value(z) + 0.5 * rho_ * (z - w).squaredNorm();
    };
    sub.gradient = [this, w](const Vector& z) -> Vector {
      return problem_.g().gradient(z) + rho_ * (z - w);
    };
    return run_inner(sub, warm_start, "z");
  }

  AdmmState step(const AdmmState& s) const {
    check_state(s.x, s.z, s.u, s.rho);
    AdmmState next;
    next.x = solve_x(s.z - s.u, s.x);
    const Vector Ax = problem_.A() * next.x;
    next.z = solve_z(Ax + s.u, s.z);
    next.u = s.u + Ax - next.z;
    next.k = s.k + 1;
    next.rho = s.rho;
    return next;
  }

  /// Accelerated step with an explicit momentum coefficient.
  AccAdmmState step(const AccAdmmState& s, double gamma) const {
    check_state(s.x, s.z_hat, s.u_hat, s.rho);
    if (!(s.r >= 3.0)) throw InvalidArgument("A-ADMM: damping r must be >= 3");
    AccAdmmState next;
    next.x = solve_x(s.z_hat - s.u_hat, s.x);
    const Vector Ax = problem_.A() * next.x;
    next.z = solve_z(Ax + s.u_hat, s.z);
    next.u = s.u_hat + Ax - next.z;
    next.u_hat = next.u + gamma * (next.u - s.u);
    next.z_hat = next.z + gamma * (next.z - s.z);
    next.z_prev = s.z;
    next.u_prev = s.u;
    next.k = s.k + 1;
    next.rho = s.rho;
    next.r = s.r;
    return next;
  }

  AccAdmmState step(const AccAdmmState& s) const {
    return step(s, momentum_coefficient(s.k, s.r));
  }

 private:
  void check_state(const Vector& x, const Vector& z, const Vector& u, double rho) const {
    if (x.size() != problem_.n() || z.size() != problem_.m() || u.size() != problem_.m()) {
      throw InvalidArgument("ADMM step: state dimensions do not match the problem");
    }
    if (rho != rho_) throw InvalidArgument("ADMM step: state rho differs from the solver's rho");
  }

  static Vector checked_solve(const Eigen::LLT<Matrix>& llt, const Matrix& K, const Vector& rhs,
                              const char* which) {
    Vector sol = llt.solve(rhs);
    const double bound = kSubproblemTolerance * (1.0 + rhs.norm());
    Vector res = rhs - K * sol;
    if (res.norm() > bound) {
      sol += llt.solve(res);  // one step of iterative refinement
      res = rhs - K * sol;
    }
    if (!sol.allFinite() || res.norm() > bound) {
      throw NumericalFailure(std::string("ADMM: ") + which +
                             "-subproblem residual above tolerance");
    }
    return sol;
  }

  Vector run_inner(const SubproblemObjective& sub, const Vector& warm, const char* which) const {
    if (!inner_) {
      throw UnsupportedClass(std::string("ADMM: ") + which +
                             "-subproblem is not quadratic and no inner minimizer was supplied");
    }
    Vector sol = inner_(sub, warm, kSubproblemTolerance);
    if (sol.size() != sub.dim || !sol.allFinite()) {
      throw NumericalFailure(std::string("ADMM: inner minimizer failed on the ") + which +
                             "-subproblem");
    }
    return sol;
  }

  SplitProblem problem_;
  double rho_;
  InnerMinimizer inner_;
  Matrix x_system_;
  Matrix z_system_;
  Eigen::LLT<Matrix> x_llt_;
  Eigen::LLT<Matrix> z_llt_;
};

inline AdmmState admm_step(const SplitProblem& problem, const AdmmState& state,
                           InnerMinimizer inner = {}) {
  return AdmmSolver(problem, state.rho, std::move(inner)).step(state);
}

inline AccAdmmState aadmm_step(const SplitProblem& problem, const AccAdmmState& state,
                               InnerMinimizer inner = {}) {
  return AdmmSolver(problem, state.rho, std::move(inner)).step(state);
}

struct SolverOptions {
  double rho = 50.0;
  std::optional<double> r;  // set: A-ADMM with this damping; unset: ADMM
  std::int64_t max_iter = 300;
  double stop_tol = 0.0;    // <= 0 runs the full budget
  std::optional<double> v_star;  // computed by optimal_value when unset
  InnerMinimizer inner;
};

/// Runs ADMM (or A-ADMM when options.r is set) from z0 = A x0, u0 = 0.
/// Sample k sits at t = k / rho for ADMM and t = k / sqrt(rho) for A-ADMM.
inline Trajectory run_solver(const SplitProblem& problem, const Vector& x0,
                             const SolverOptions& options) {
  if (options.max_iter < 1) throw InvalidArgument("run_solver: max_iter must be >= 1");
  const bool accelerated = options.r.has_value();
  const AdmmSolver solver(problem, options.rho, options.inner);
  const double time_scale = accelerated ? 1.0 / std::sqrt(options.rho) : 1.0 / options.rho;

  Trajectory traj;
  traj.method = accelerated ? Method::kAccAdmm : Method::kAdmm;
  traj.v_star = detail::resolve_v_star(problem, options.v_star);
  traj.samples.reserve(static_cast<std::size_t>(options.max_iter) + 1);

  const auto start = std::chrono::steady_clock::now();
  auto record = [&](std::int64_t k, const Vector& x, const Vector& z) {
    Sample s;
    s.k = k;
    s.t = static_cast<double>(k) * time_scale;
    s.x = x;
    s.v_gap = eval_V(problem, x) - traj.v_star;
    s.primal_residual = (problem.A() * x - z).norm();
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!x.allFinite() || !std::isfinite(s.v_gap)) {
      throw TrajectoryDivergence(std::string(method_name(traj.method)) +
                                     ": non-finite iterate at k=" + std::to_string(k),
                                 traj);
    }
    traj.samples.push_back(std::move(s));
  };
  auto should_stop = [&](const Vector& x, const Vector& z, const Vector& z_prev) {
    if (options.stop_tol <= 0.0) return false;
    return (problem.A() * x - z).norm() + (z - z_prev).norm() <= options.stop_tol;
  };

  if (accelerated) {
    AccAdmmState s = initial_aadmm_state(problem, x0, options.rho, *options.r);
    record(0, s.x, s.z);
    while (s.k < options.max_iter) {
      s = solver.step(s);
      record(s.k, s.x, s.z);
      if (should_stop(s.x, s.z, s.z_prev)) break;
    }
  } else {
    AdmmState s = initial_admm_state(problem, x0, options.rho);
    record(0, s.x, s.z);
    while (s.k < options.max_iter) {
      const Vector z_prev = s.z;
      s = solver.step(s);
      record(s.k, s.x, s.z);
      if (should_stop(s.x, s.z, z_prev)) break;
    }
  }
  return traj;
}

}  // namespace admmflow

#endif  // ADMMFLOW_DISCRETE_HPP_
