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

// Split problems  min f(x) + g(z)  s.t.  z = A x  and the composite
// objective V(x) = f(x) + g(A x) that both the discrete solvers and the
// continuous flows descend.

#ifndef ADMMFLOW_PROBLEM_HPP_
#define ADMMFLOW_PROBLEM_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "admmflow/errors.hpp"

namespace admmflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// h(v) = 1/2 <v, M v> + <q, v> with M symmetric positive semidefinite.
/// M is symmetrized on construction.
class QuadraticFunction {
 public:
  QuadraticFunction(Matrix M, Vector q) : M_(std::move(M)), q_(std::move(q)) {
    if (M_.rows() != M_.cols() || M_.rows() != q_.size() || M_.rows() == 0) {
      throw InvalidArgument("QuadraticFunction: M must be square and match q");
    }
    if (!M_.allFinite() || !q_.allFinite()) {
      throw InvalidArgument("QuadraticFunction: non-finite coefficients");
    }
    M_ = (0.5 * (M_ + M_.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M_, Eigen::EigenvaluesOnly);
    const double scale = M_.norm();
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
      throw InvalidArgument("QuadraticFunction: M is not positive semidefinite");
    }
  }

  static QuadraticFunction zero(Eigen::Index dim) {
    return {Matrix::Zero(dim, dim), Vector::Zero(dim)};
  }

  Eigen::Index dim() const noexcept { return q_.size(); }
  const Matrix& hessian() const noexcept { return M_; }
  const Vector& linear() const noexcept { return q_; }

  double value(const Vector& v) const { return 0.5 * v.dot(M_ * v) + q_.dot(v); }
  Vector gradient(const Vector& v) const { return M_ * v + q_; }

 private:
  Matrix M_;
  Vector q_;
};

/// A continuously differentiable convex term of the split objective: either
/// a QuadraticFunction (closed-form subproblems) or a value/gradient pair.
class SmoothTerm {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  SmoothTerm(QuadraticFunction q)  // NOLINT(runtime/explicit)
      : dim_(q.dim()), quadratic_(std::make_shared<const QuadraticFunction>(std::move(q))) {}

  static SmoothTerm callback(Eigen::Index dim, ValueFn value, GradientFn gradient) {
    if (dim <= 0 || !value || !gradient) {
      throw InvalidArgument("SmoothTerm::callback: need dim > 0 and both callbacks");
    }
    SmoothTerm term(dim);
    term.value_ = std::move(value);
    term.gradient_ = std::move(gradient);
    return term;
  }

  Eigen::Index dim() const noexcept { return dim_; }
  bool is_quadratic() const noexcept { return quadratic_ != nullptr; }
  /// Null for callback terms.
  const QuadraticFunction* quadratic() const noexcept { return quadratic_.get(); }

  double value(const Vector& v) const {
    return quadratic_ ? quadratic_->value(v) : value_(v);
  }
  Vector gradient(const Vector& v) const {
    return quadratic_ ? quadratic_->gradient(v) : gradient_(v);
  }

 private:
  explicit SmoothTerm(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim_;
  std::shared_ptr<const QuadraticFunction> quadratic_;
  ValueFn value_;
  GradientFn gradient_;
};

/// Parameters of the random experiment generator. Kept with the problem so
/// that serialized files record their provenance.
struct Figure1Params {
  Eigen::Index n = 60;
  Eigen::Index m = 0;  // 0 means square (m = n)
  Eigen::Index zero_eigs = 40;
  double eig_hi = 10.0;
  double cond_A = 100.0;
  std::uint64_t seed = 7;
};

/// The triple (f, g, A). Immutable once built; the Cholesky factor of the
/// Gram matrix A^T A is computed eagerly so flows never form an inverse.
class SplitProblem {
 public:
  SplitProblem(SmoothTerm f, SmoothTerm g, Matrix A)
      : f_(std::move(f)), g_(std::move(g)), A_(std::move(A)) {
    const auto n = A_.cols();
    const auto m = A_.rows();
    if (n == 0 || m < n) {
      throw InvalidArgument("SplitProblem: A must be m x n with m >= n >= 1");
    }
    if (f_.dim() != n || g_.dim() != m) {
      throw InvalidArgument("SplitProblem: dim(f) must equal cols(A) and dim(g) rows(A)");
    }
    if (!A_.allFinite()) throw InvalidArgument("SplitProblem: A has non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(A_);
    const auto& s = svd.singularValues();
    sigma_max_ = s(0);
    sigma_min_ = s(s.size() - 1);
    if (!(sigma_min_ > 1e-10 * sigma_max_)) {
      throw InvalidArgument("SplitProblem: A does not have full column rank");
    }
    gram_ = std::make_shared<const Eigen::LLT<Matrix>>(A_.transpose() * A_);
    if (gram_->info() != Eigen::Success) {
      throw NumericalFailure("SplitProblem: Cholesky of A^T A failed");
    }
  }

  const SmoothTerm& f() const noexcept { return f_; }
  const SmoothTerm& g() const noexcept { return g_; }
  const Matrix& A() const noexcept { return A_; }
  Eigen::Index n() const noexcept { return A_.cols(); }
  Eigen::Index m() const noexcept { return A_.rows(); }
  bool is_quadratic() const noexcept { return f_.is_quadratic() && g_.is_quadratic(); }
  double cond_A() const noexcept { return sigma_max_ / sigma_min_; }

  /// (A^T A)^{-1} v through the cached factorization.
  Vector gram_solve(const Vector& v) const { return gram_->solve(v); }

  const std::optional<Figure1Params>& generator_params() const noexcept { return params_; }
  void set_generator_params(const Figure1Params& p) { params_ = p; }

 private:
  SmoothTerm f_;
  SmoothTerm g_;
  Matrix A_;
  double sigma_max_ = 0.0;
  double sigma_min_ = 0.0;
  std::shared_ptr<const Eigen::LLT<Matrix>> gram_;
  std::optional<Figure1Params> params_;
};

namespace detail {

inline void check_dim(const SplitProblem& problem, const Vector& x, const char* who) {
  if (x.size() != problem.n()) {
    throw InvalidArgument(std::string(who) + ": expected a vector of length " +
                          std::to_string(problem.n()) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace detail

/// V(x) = f(x) + g(A x).
inline double eval_V(const SplitProblem& problem, const Vector& x) {
  detail::check_dim(problem, x, "eval_V");
  return problem.f().value(x) + problem.g().value(problem.A() * x);
}

/// grad V(x) = grad f(x) + A^T grad g(A x).
inline Vector grad_V(const SplitProblem& problem, const Vector& x) {
  detail::check_dim(problem, x, "grad_V");
  return problem.f().gradient(x) +
         problem.A().transpose() * problem.g().gradient(problem.A() * x);
}

/// Hessian of V for the quadratic class: M_f + A^T M_g A.
inline Matrix hessian_V(const SplitProblem& problem) {
  if (!problem.is_quadratic()) {
    throw UnsupportedClass("hessian_V: requires quadratic f and g");
  }
  const Matrix& A = problem.A();
  Matrix H = problem.f().quadratic()->hessian() +
             A.transpose() * problem.g().quadratic()->hessian() * A;
  return (0.5 * (H + H.transpose())).eval();
}

struct Minimizer {
  Vector x;
  double value;
};

/// Minimum-norm minimizer of a quadratic V and the optimal value V*.
/// Throws UnsupportedClass for callback terms and InvalidArgument when V is
/// unbounded below (linear term outside the range of the Hessian).
inline Minimizer optimal_value(const SplitProblem& problem) {
  if (!problem.is_quadratic()) {
    throw UnsupportedClass("optimal_value: closed form needs quadratic f and g; supply V* externally");
  }
  const Matrix H = hessian_V(problem);
  const Vector b = -(problem.f().quadratic()->linear() +
                     problem.A().transpose() * problem.g().quadratic()->linear());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  const Vector& lambda = eig.eigenvalues();
  const double cutoff = 1e-10 * std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
  const Vector coeffs = eig.eigenvectors().transpose() * b;
  Vector y = Vector::Zero(coeffs.size());
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    if (lambda(i) > cutoff) y(i) = coeffs(i) / lambda(i);
  }
  Vector x = eig.eigenvectors() * y;
  // One refinement pass against the original Hessian.
  const Vector r = b - H * x;
  Vector dy = eig.eigenvectors().transpose() * r;
  for (Eigen::Index i = 0; i < dy.size(); ++i) dy(i) = lambda(i) > cutoff ? dy(i) / lambda(i) : 0.0;
  x += eig.eigenvectors() * dy;

  const double scale = 1.0 + grad_V(problem, Vector::Zero(problem.n())).norm();
  if (grad_V(problem, x).norm() > 1e-8 * scale) {
    throw InvalidArgument("optimal_value: V is unbounded below (no stationary point)");
  }
  return {x, eval_V(problem, x)};
}

namespace detail {

inline double resolve_v_star(const SplitProblem& problem, const std::optional<double>& v_star) {
  if (v_star) return *v_star;
  return optimal_value(problem).value;
}

}  // namespace detail

namespace detail {

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
inline Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace detail

/// Spectrum drawn by the generator, exposed for verification.
struct GeneratedSpectrum {
  Vector eigenvalues_M;    // unsorted, as placed on the diagonal
  Vector singular_values_A;
};

/// Random instance of the numerical experiment: f(x) = 1/2 <x, M x> with
/// exactly `zero_eigs` zero eigenvalues and the rest uniform on (0, eig_hi],
/// g = 0, and A = U S W^T with log-uniformly spaced singular values in
/// [1, cond_A]. Deterministic in `seed`.
inline SplitProblem gen_figure1_problem(const Figure1Params& p,
                                        GeneratedSpectrum* spectrum = nullptr) {
  const Eigen::Index n = p.n;
  const Eigen::Index m = p.m == 0 ? p.n : p.m;
  if (n < 1) throw InvalidArgument("gen_figure1_problem: n must be >= 1");
  if (m < n) throw InvalidArgument("gen_figure1_problem: m must be >= n");
  if (p.zero_eigs < 0 || p.zero_eigs >= n) {
    throw InvalidArgument("gen_figure1_problem: need 0 <= zero_eigs < n");
  }
  if (!(p.eig_hi > 0.0) || !std::isfinite(p.eig_hi)) {
    throw InvalidArgument("gen_figure1_problem: eig_hi must be positive");
  }
  if (!(p.cond_A >= 1.0) || !std::isfinite(p.cond_A)) {
    throw InvalidArgument("gen_figure1_problem: cond_A must be >= 1");
  }

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Matrix Q = detail::random_orthogonal(n, rng);
  Vector lambda = Vector::Zero(n);
  for (Eigen::Index i = p.zero_eigs; i < n; ++i) {
    lambda(i) = p.eig_hi * (1.0 - unit(rng));  // (0, eig_hi]
  }
  Matrix M = Q * lambda.asDiagonal() * Q.transpose();
  M = (0.5 * (M + M.transpose())).eval();

  const Matrix U = detail::random_orthogonal(m, rng);
  const Matrix W = detail::random_orthogonal(n, rng);
  Vector sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    sigma(i) = std::pow(p.cond_A, frac);
  }
  if (n == 1) sigma(0) = 1.0;
  const Matrix A = U.leftCols(n) * sigma.asDiagonal() * W.transpose();

  if (spectrum != nullptr) *spectrum = {lambda, sigma};

  SplitProblem problem(QuadraticFunction(std::move(M), Vector::Zero(n)),
                       QuadraticFunction::zero(m), A);
  Figure1Params recorded = p;
  recorded.m = m;
  problem.set_generator_params(recorded);
  return problem;
}

}  // namespace admmflow

#endif  // ADMMFLOW_PROBLEM_HPP_
