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

#ifndef ADMMFLOW_ERRORS_HPP_
#define ADMMFLOW_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace admmflow {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, out-of-range parameter, bad file.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The operation needs a closed form that the supplied function class lacks
/// (e.g. a minimizer of a callback-defined objective).
class UnsupportedClass : public Error {
 public:
  using Error::Error;
};

/// A linear solve or factorization failed its residual check.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A trajectory produced a non-finite state.
class DivergenceError : public NumericalFailure {
 public:
  DivergenceError(const std::string& what, double last_finite_t)
      : NumericalFailure(what), last_finite_t_(last_finite_t) {}

  double last_finite_t() const noexcept { return last_finite_t_; }

 private:
  double last_finite_t_;
};

}  // namespace admmflow

#endif  // ADMMFLOW_ERRORS_HPP_
