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

#ifndef ADMMFLOW_TESTS_FIXTURES_HPP_
#define ADMMFLOW_TESTS_FIXTURES_HPP_

#include <random>

#include "admmflow/admmflow.hpp"
#include "oracles.hpp"

namespace admmflow::testing {

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
inline Vector vec1(double v) { return Vector::Constant(1, v); }

/// f = m_f/2 x^2 + q_f x, g = m_g/2 z^2, A = [a].
inline SplitProblem scalar_problem(double m_f, double q_f, double m_g, double a) {
  return SplitProblem(QuadraticFunction(scalar(m_f), vec1(q_f)),
                      QuadraticFunction(scalar(m_g), vec1(0.0)), scalar(a));
}

/// Random quadratic split problem with PSD M_f, M_g and a well-conditioned A.
inline SplitProblem random_quadratic_problem(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng) {
  Matrix A = random_matrix(m, n, rng);
  A += 3.0 * Matrix::Identity(m, n);
  return SplitProblem(QuadraticFunction(random_psd(n, n, rng), random_vector(n, rng)),
                      QuadraticFunction(random_psd(m, m, rng) * 0.5, random_vector(m, rng)), A);
}

/// The same problem with f and g re-wrapped as value/gradient callbacks.
inline SplitProblem as_callback_problem(const SplitProblem& p) {
  const QuadraticFunction f = *p.f().quadratic();
  const QuadraticFunction g = *p.g().quadratic();
  return SplitProblem(
      SmoothTerm::callback(
          p.n(), [f](const Vector& x) { return f.value(x); },
          [f](const Vector& x) { return f.gradient(x); }),
      SmoothTerm::callback(
          p.m(), [g](const Vector& z) { return g.value(z); },
          [g](const Vector& z) { return g.gradient(z); }),
      p.A());
}

/// Inner-solver hook backed by the conjugate-gradient oracle.
inline InnerMinimizer cg_inner_minimizer() {
  return [](const SubproblemObjective& sub, const Vector& warm, double tol) {
    const double scale = 1.0 + sub.gradient(warm).norm();
    return conjugate_gradient_minimize(sub.gradient, warm, tol * scale);
  };
}

inline SplitProblem default_figure1_problem() { return gen_figure1_problem(Figure1Params{}); }

}  // namespace admmflow::testing

#endif  // ADMMFLOW_TESTS_FIXTURES_HPP_
