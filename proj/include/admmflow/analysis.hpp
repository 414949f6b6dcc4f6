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

// Lyapunov monitors and rate estimators over recorded trajectories.
//
// Each monitor evaluates an energy E along the samples, flags per-sample
// decay (E_i <= E_{i-1} + tolerance) and reports a residual comparing the
// finite-difference derivative of E with its closed-form expression on the
// flow. Four energies are provided:
//
//   stability, first order:   E = V(X) - V*
//   rate, first order:        E = t (V(X) - V*) + 1/2 ||A (X - X*)||^2
//   stability, second order:  E = 1/2 ||A X'||^2 + V(X) - V*
//   rate, second order:       E = e^eta (V(X) - V*) + 1/2 ||A (X - X* + e^{eta/2} X')||^2,
//                             eta(t) = 2 log(t / (r - 1))

#ifndef ADMMFLOW_ANALYSIS_HPP_
#define ADMMFLOW_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "admmflow/errors.hpp"
#include "admmflow/flows.hpp"
#include "admmflow/problem.hpp"
#include "admmflow/trajectory.hpp"

namespace admmflow {

struct LyapunovSample {
  double t = 0.0;
  double value = 0.0;
  bool decay_ok = true;
  /// Monitor-specific consistency residual; see each monitor.
  double residual = 0.0;
};

/// Per-step allowance: E_i <= E_{i-1} + absolute + relative * |E_{i-1}|.
struct DecayTolerance {
  double absolute = 1e-9;
  double relative = 1e-9;
};

/// RK4 trajectories: 1e-9 (1 + |E|).
inline constexpr DecayTolerance kRk4DecayTolerance{1e-9, 1e-9};
/// Symplectic Euler trajectories: 1e-5 relative per step.
inline constexpr DecayTolerance kSymplecticDecayTolerance{0.0, 1e-5};

/// Fraction of samples with decay_ok set.
inline double decay_fraction(std::span<const LyapunovSample> samples) {
  if (samples.empty()) return 1.0;
  const auto ok = std::count_if(samples.begin(), samples.end(),
                                [](const LyapunovSample& s) { return s.decay_ok; });
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

namespace detail {

inline void require_samples(const Trajectory& traj, const char* who) {
  if (traj.size() < 2) {
    throw InvalidArgument(std::string(who) + ": trajectory needs at least 2 samples");
  }
}

inline void require_velocity(const Trajectory& traj, const char* who) {
  for (const auto& s : traj.samples) {
    if (!s.xdot) {
      throw InvalidArgument(std::string(who) +
                            ": trajectory has no velocity samples (second-order flow expected)");
    }
  }
}

inline void mark_decay(std::vector<LyapunovSample>& out, const DecayTolerance& tol) {
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double prev = out[i - 1].value;
    out[i].decay_ok = out[i].value <= prev + tol.absolute + tol.relative * std::abs(prev);
  }
  if (!out.empty()) out.front().decay_ok = std::isfinite(out.front().value);
}

/// dE/dt at sample i: central differences inside, one-sided at the ends.
inline double sample_derivative(const std::vector<LyapunovSample>& e, std::size_t i) {
  const std::size_t n = e.size();
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
  return (e[hi].value - e[lo].value) / (e[hi].t - e[lo].t);
}

}  // namespace detail

/// E = V(X) - V(X*). Residual: |dE/dt + ||A X'||^2| with X' from the flow
/// right-hand side and dE/dt from finite differences of E.
inline std::vector<LyapunovSample> monitor_admm_stability(
    const SplitProblem& problem, const Trajectory& traj, const Vector& x_star,
    const DecayTolerance& tol = kRk4DecayTolerance) {
  detail::require_samples(traj, "monitor_admm_stability");
  const double v_star = eval_V(problem, x_star);
  std::vector<LyapunovSample> out(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out[i].t = traj.samples[i].t;
    out[i].value = eval_V(problem, traj.samples[i].x) - v_star;
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vector xdot = admm_flow_rhs(problem, traj.samples[i].x);
    const double analytic = -(problem.A() * xdot).squaredNorm();
    out[i].residual = std::abs(detail::sample_derivative(out, i) - analytic);
  }
  detail::mark_decay(out, tol);
  return out;
}

/// E = t (V(X) - V*) + 1/2 ||A (X - X*)||^2. Residual: |dE/dt - dE/dt_exact|
/// where the exact derivative along the flow is
///   -t ||A X'||^2 + V(X) - V* + <X* - X, grad V(X)>.
inline std::vector<LyapunovSample> monitor_admm_rate(
    const SplitProblem& problem, const Trajectory& traj, const Vector& x_star,
    const DecayTolerance& tol = kRk4DecayTolerance) {
  detail::require_samples(traj, "monitor_admm_rate");
  const double v_star = eval_V(problem, x_star);
  const Matrix& A = problem.A();
  std::vector<LyapunovSample> out(traj.size());
  std::vector<double> exact(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    const double gap = eval_V(problem, s.x) - v_star;
    out[i].t = s.t;
    out[i].value = s.t * gap + 0.5 * (A * (s.x - x_star)).squaredNorm();
    const Vector grad = grad_V(problem, s.x);
    const Vector xdot = -problem.gram_solve(grad);
    exact[i] = -s.t * (A * xdot).squaredNorm() + gap + (x_star - s.x).dot(grad);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].residual = std::abs(detail::sample_derivative(out, i) - exact[i]);
  }
  detail::mark_decay(out, tol);
  return out;
}

/// E = 1/2 ||A X'||^2 + V(X) - V*. Residual: |dE/dt + (r/t) ||A X'||^2|.
inline std::vector<LyapunovSample> monitor_aadmm_stability(
    const SplitProblem& problem, const Trajectory& traj, const Vector& x_star, double r,
    const DecayTolerance& tol = kSymplecticDecayTolerance) {
  detail::require_samples(traj, "monitor_aadmm_stability");
  detail::require_velocity(traj, "monitor_aadmm_stability");
  const double v_star = eval_V(problem, x_star);
  const Matrix& A = problem.A();
  std::vector<LyapunovSample> out(traj.size());
  std::vector<double> dissipation(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    const double kinetic = (A * *s.xdot).squaredNorm();
    out[i].t = s.t;
    out[i].value = 0.5 * kinetic + eval_V(problem, s.x) - v_star;
    dissipation[i] = s.t > 0.0 ? (r / s.t) * kinetic : 0.0;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].residual = std::abs(detail::sample_derivative(out, i) + dissipation[i]);
  }
  detail::mark_decay(out, tol);
  return out;
}

/// eta(t) = 2 log(t / (r - 1)).
inline double eta_weight_exponent(double t, double r) { return 2.0 * std::log(t / (r - 1.0)); }

/// e^{-eta/2} + eta'/2 - r/t; zero for every t > 0.
inline double eta_identity_residual(double t, double r) {
  const double eta = eta_weight_exponent(t, r);
  const double eta_dot = 2.0 / t;
  return std::exp(-0.5 * eta) + 0.5 * eta_dot - r / t;
}

/// E = e^eta (V(X) - V*) + 1/2 ||A (X - X* + e^{eta/2} X')||^2.
/// Residual: |e^{-eta/2} + eta'/2 - r/t| at the sample time.
inline std::vector<LyapunovSample> monitor_aadmm_rate(
    const SplitProblem& problem, const Trajectory& traj, const Vector& x_star, double r,
    const DecayTolerance& tol = kSymplecticDecayTolerance) {
  if (!(r >= 3.0)) throw InvalidArgument("monitor_aadmm_rate: r must be >= 3");
  detail::require_samples(traj, "monitor_aadmm_rate");
  detail::require_velocity(traj, "monitor_aadmm_rate");
  const double v_star = eval_V(problem, x_star);
  const Matrix& A = problem.A();
  std::vector<LyapunovSample> out(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    if (!(s.t > 0.0)) throw InvalidArgument("monitor_aadmm_rate: sample times must be positive");
    const double eta = eta_weight_exponent(s.t, r);
    out[i].t = s.t;
    out[i].value = std::exp(eta) * (eval_V(problem, s.x) - v_star) +
                   0.5 * (A * (s.x - x_star + std::exp(0.5 * eta) * *s.xdot)).squaredNorm();
    out[i].residual = std::abs(eta_identity_residual(s.t, r));
  }
  detail::mark_decay(out, tol);
  return out;
}

struct RateWindow {
  double lo = 2.0;
  double hi = 20.0;
};

struct RateFit {
  double slope = 0.0;
  double C = 0.0;
  RateWindow window;
  std::size_t n_samples = 0;
};

inline constexpr double kGapNoiseFloor = 1e-14;
inline constexpr std::size_t kMinFitSamples = 10;

/// Least-squares slope of log(gap) against log(t) over the window, and
/// C = max over the window of gap * t^{-slope_target}.
inline RateFit fit_rate(std::span<const double> t, std::span<const double> gap, RateWindow window,
                        double slope_target) {
  if (t.size() != gap.size()) throw InvalidArgument("fit_rate: t and gap lengths differ");
  if (!(window.lo > 0.0) || !(window.hi > window.lo)) {
    throw InvalidArgument("fit_rate: window must satisfy 0 < lo < hi");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, c = 0;
  std::size_t count = 0;
  double last_above_floor = std::numeric_limits<double>::quiet_NaN();
  bool underflow = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.lo || t[i] > window.hi) continue;
    if (!(gap[i] > kGapNoiseFloor)) {
      underflow = true;
      continue;
    }
    if (!underflow) last_above_floor = t[i];
    const double lx = std::log(t[i]);
    const double ly = std::log(gap[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    c = std::max(c, gap[i] * std::pow(t[i], -slope_target));
    ++count;
  }
  if (underflow) {
    throw InvalidArgument(
        "fit_rate: V-gap falls below the noise floor (1e-14) inside the window; shrink the window" +
        (std::isnan(last_above_floor) ? std::string()
                                      : " to hi <= " + std::to_string(last_above_floor)));
  }
  if (count < kMinFitSamples) {
    throw InvalidArgument("fit_rate: window holds " + std::to_string(count) +
                          " samples; at least 10 are required");
  }
  const double nn = static_cast<double>(count);
  const double denom = nn * sxx - sx * sx;
  if (!(denom > 0.0)) throw InvalidArgument("fit_rate: window samples share a single time");
  RateFit fit;
  fit.slope = (nn * sxy - sx * sy) / denom;
  fit.C = c;
  fit.window = window;
  fit.n_samples = count;
  return fit;
}

inline RateFit fit_rate(const Trajectory& traj, double v_star, RateWindow window,
                        double slope_target) {
  const auto t = traj.times();
  std::vector<double> gap;
  gap.reserve(traj.size());
  // Recorded gaps are relative to traj.v_star; re-reference to the caller's V*.
  for (const auto& s : traj.samples) gap.push_back(s.v_gap + traj.v_star - v_star);
  return fit_rate(std::span<const double>(t), std::span<const double>(gap), window, slope_target);
}

struct ConvergenceReport {
  bool converged = false;
  double mu = 0.0;                // smallest Hessian eigenvalue of V
  double initial_distance = 0.0;  // ||X(t0) - X*||
  double final_distance = 0.0;    // ||X(t_end) - X*||
  double max_speed = 0.0;         // max ||X'|| over the run
  double final_speed = 0.0;       // ||X'(t_end)||
  bool forcing_bound_holds = true;  // V - V* >= mu/2 ||X - X*||^2 at every sample
  std::string detail;
};

namespace detail {

/// True when chunk maxima of the tail are non-increasing, the last chunk
/// sits strictly below the first, and nothing exceeds 10x the first chunk.
inline bool tail_envelope_decreasing(const std::vector<double>& v, std::size_t begin,
                                     std::size_t chunks) {
  const std::size_t len = v.size() - begin;
  chunks = std::max<std::size_t>(1, std::min(chunks, len));
  std::vector<double> maxima;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = begin + c * len / chunks;
    const std::size_t hi = begin + (c + 1) * len / chunks;
    maxima.push_back(*std::max_element(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                       v.begin() + static_cast<std::ptrdiff_t>(hi)));
  }
  const double reference = maxima.front();
  if (reference <= 1e-14) {
    return std::all_of(maxima.begin(), maxima.end(), [](double m) { return m <= 1e-14; });
  }
  for (std::size_t c = 1; c < maxima.size(); ++c) {
    if (maxima[c] > maxima[c - 1] || maxima[c] > 10.0 * reference) return false;
  }
  return maxima.back() < reference;
}

}  // namespace detail

/// State convergence on strongly convex quadratics, where the forcing
/// function phi(s) = mu/2 s^2 with mu = lambda_min(hess V) turns the
/// objective-gap decay into ||X - X*|| -> 0. Checks that both ||X - X*||
/// and ||X'|| decrease in envelope over the trailing `tail_fraction`.
inline ConvergenceReport check_state_convergence(const SplitProblem& problem,
                                                 const Trajectory& traj, const Vector& x_star,
                                                 double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw InvalidArgument("check_state_convergence: tail_fraction must lie in (0, 1]");
  }
  detail::require_samples(traj, "check_state_convergence");
  detail::require_velocity(traj, "check_state_convergence");
  const Matrix H = hessian_V(problem);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  ConvergenceReport report;
  report.mu = eig.eigenvalues().minCoeff();
  if (!(report.mu > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))) {
    throw UnsupportedClass(
        "check_state_convergence: V is not strongly convex (mu <= 0); no forcing function");
  }

  const double v_star = eval_V(problem, x_star);
  std::vector<double> dist, speed;
  dist.reserve(traj.size());
  speed.reserve(traj.size());
  for (const auto& s : traj.samples) {
    const double d = (s.x - x_star).norm();
    dist.push_back(d);
    speed.push_back(s.xdot->norm());
    const double gap = eval_V(problem, s.x) - v_star;
    if (gap + 1e-12 * (1.0 + std::abs(v_star)) < 0.5 * report.mu * d * d) {
      report.forcing_bound_holds = false;
    }
  }
  report.initial_distance = dist.front();
  report.final_distance = dist.back();
  report.max_speed = *std::max_element(speed.begin(), speed.end());
  report.final_speed = speed.back();

  const auto tail_len = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(traj.size()))));
  const std::size_t begin = traj.size() - std::min(tail_len, traj.size());
  const bool dist_ok = detail::tail_envelope_decreasing(dist, begin, 5);
  const bool speed_ok = detail::tail_envelope_decreasing(speed, begin, 5);
  report.converged = dist_ok && speed_ok;
  report.detail = std::string("distance envelope ") + (dist_ok ? "decreasing" : "not decreasing") +
                  ", speed envelope " + (speed_ok ? "decreasing" : "not decreasing");
  return report;
}

/// Relative sup discrepancy between a discrete V-gap curve and a flow V-gap
/// curve: max over discrete samples inside the flow's time range of
/// |gap_d(t) - gap_f(t)| / (1 + gap_f(t)), gap_f linearly interpolated.
inline double curve_discrepancy(const Trajectory& discrete, const Trajectory& flow) {
  if (discrete.empty() || flow.size() < 2) {
    throw InvalidArgument("curve_discrepancy: need a discrete curve and a flow with >= 2 samples");
  }
  const auto ft = flow.times();
  const auto fg = flow.gaps();
  double worst = 0.0;
  std::size_t compared = 0;
  for (const auto& s : discrete.samples) {
    if (s.t < ft.front() || s.t > ft.back()) continue;
    auto it = std::upper_bound(ft.begin(), ft.end(), s.t);
    std::size_t j = static_cast<std::size_t>(it - ft.begin());
    if (j == ft.size()) j = ft.size() - 1;
    if (j == 0) j = 1;
    const double w = (s.t - ft[j - 1]) / (ft[j] - ft[j - 1]);
    const double interp = (1.0 - w) * fg[j - 1] + w * fg[j];
    worst = std::max(worst, std::abs(s.v_gap - interp) / (1.0 + interp));
    ++compared;
  }
  if (compared == 0) throw InvalidArgument("curve_discrepancy: curves share no time range");
  return worst;
}

}  // namespace admmflow

#endif  // ADMMFLOW_ANALYSIS_HPP_
