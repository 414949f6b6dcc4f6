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

#ifndef ADMMFLOW_TRAJECTORY_HPP_
#define ADMMFLOW_TRAJECTORY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "admmflow/errors.hpp"
#include "admmflow/problem.hpp"

namespace admmflow {

enum class Method { kAdmm, kAccAdmm, kAdmmFlow, kAccAdmmFlow };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kAdmm: return "admm";
    case Method::kAccAdmm: return "aadmm";
    case Method::kAdmmFlow: return "admm_flow";
    case Method::kAccAdmmFlow: return "aadmm_flow";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(const std::string& s) {
  if (s == "admm") return Method::kAdmm;
  if (s == "aadmm") return Method::kAccAdmm;
  if (s == "admm_flow") return Method::kAdmmFlow;
  if (s == "aadmm_flow") return Method::kAccAdmmFlow;
  return std::nullopt;
}

inline bool is_discrete(Method m) { return m == Method::kAdmm || m == Method::kAccAdmm; }

struct Sample {
  std::int64_t k = 0;  // iteration or step index
  double t = 0.0;
  Vector x;
  std::optional<Vector> xdot;         // second-order flow only
  double v_gap = 0.0;                 // V(x) - V*
  std::optional<double> primal_residual;  // ||A x - z||, discrete only
  std::optional<double> hamiltonian;      // second-order flow only
  double wall_time = 0.0;             // seconds since the run started
};

struct Trajectory {
  Method method = Method::kAdmm;
  double v_star = 0.0;
  std::vector<Sample> samples;
  /// Set when a run stopped on a non-finite state; samples hold the finite prefix.
  bool truncated = false;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }

  std::vector<double> times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t);
    return out;
  }
  std::vector<double> gaps() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.v_gap);
    return out;
  }
};

/// Divergence with the finite prefix of the run attached.
class TrajectoryDivergence : public DivergenceError {
 public:
  TrajectoryDivergence(const std::string& what, Trajectory partial)
      : DivergenceError(what, partial.empty() ? 0.0 : partial.back().t),
        partial_(std::move(partial)) {
    partial_.truncated = true;
  }

  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

}  // namespace admmflow

#endif  // ADMMFLOW_TRAJECTORY_HPP_
