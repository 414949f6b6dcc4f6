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

// Test-only reference computations. None of these call into the solver,
// integrator or monitor code paths they are used to check.

#ifndef ADMMFLOW_TESTS_ORACLES_HPP_
#define ADMMFLOW_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace admmflow::testing {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Central differences of a scalar function.
inline Vec central_difference_gradient(const std::function<double(const Vec&)>& fn, const Vec& x,
                                       double step) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    g(i) = (fn(xp) - fn(xm)) / (2.0 * step);
  }
  return g;
}

/// 1/2 x^T M x summed over the eigen-decomposition of M.
inline double quadratic_form_by_eigen(const Mat& M, const Vec& x) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(M);
  const Vec c = eig.eigenvectors().transpose() * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) total += 0.5 * eig.eigenvalues()(i) * c(i) * c(i);
  return total;
}

inline Mat random_spd(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(lo, hi);
  Mat G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  Vec d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = unif(rng);
  return Q * d.asDiagonal() * Q.transpose();
}

inline Mat random_psd(Eigen::Index n, Eigen::Index rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat B(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j)
    for (Eigen::Index i = 0; i < n; ++i) B(i, j) = normal(rng);
  return B * B.transpose();
}

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = normal(rng);
  return A;
}

inline Vec random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

/// Polak-Ribiere nonlinear conjugate gradients with a secant line search on
/// the directional derivative. Uses only value/gradient callbacks, so it is
/// independent of the Cholesky path in the solvers. Restarts every `dim`
/// iterations; exact on quadratics up to rounding.
inline Vec conjugate_gradient_minimize(const std::function<Vec(const Vec&)>& grad, Vec x,
                                       double tol, int max_iter = 20000) {
  Vec g = grad(x);
  Vec d = -g;
  const auto n = x.size();
  for (int it = 0; it < max_iter && g.norm() > tol; ++it) {
    // Secant iterations on phi'(a) = <grad(x + a d), d>.
    double a0 = 0.0, a1 = 1e-3 / std::max(1.0, d.norm());
    double p0 = g.dot(d);
    double p1 = grad(x + a1 * d).dot(d);
    for (int ls = 0; ls < 50 && std::abs(p1) > 1e-14 * std::abs(p0) && p1 != p0; ++ls) {
      const double a2 = a1 - p1 * (a1 - a0) / (p1 - p0);
      a0 = a1;
      p0 = p1;
      a1 = a2;
      p1 = grad(x + a1 * d).dot(d);
    }
    x += a1 * d;
    const Vec g_new = grad(x);
    double beta = g_new.dot(g_new - g) / g.dot(g);
    if (!(beta > 0.0) || (it + 1) % n == 0) beta = 0.0;
    d = -g_new + beta * d;
    if (d.dot(g_new) >= 0.0) d = -g_new;
    g = g_new;
  }
  return x;
}

/// Classical RK4 on the first-order system Y1' = Y2, Y2' = accel(t, Y1, Y2).
/// Returns (t, Y1, Y2) at every step.
struct SecondOrderSample {
  double t;
  Vec x;
  Vec v;
};

inline std::vector<SecondOrderSample> rk4_second_order(
    const std::function<Vec(double, const Vec&, const Vec&)>& accel, double t0, Vec x, Vec v,
    double h, std::int64_t steps) {
  std::vector<SecondOrderSample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  double t = t0;
  out.push_back({t, x, v});
  for (std::int64_t i = 0; i < steps; ++i) {
    const Vec k1x = v;
    const Vec k1v = accel(t, x, v);
    const Vec k2x = v + 0.5 * h * k1v;
    const Vec k2v = accel(t + 0.5 * h, x + 0.5 * h * k1x, k2x);
    const Vec k3x = v + 0.5 * h * k2v;
    const Vec k3v = accel(t + 0.5 * h, x + 0.5 * h * k2x, k3x);
    const Vec k4x = v + h * k3v;
    const Vec k4v = accel(t + h, x + h * k3x, k4x);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t = t0 + static_cast<double>(i + 1) * h;
    out.push_back({t, x, v});
  }
  return out;
}

}  // namespace admmflow::testing

#endif  // ADMMFLOW_TESTS_ORACLES_HPP_
