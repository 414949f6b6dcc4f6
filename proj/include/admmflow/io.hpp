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

// Problem files (JSON) and trajectory / monitor / rate CSVs.
//
// Problem file layout (matrices are flat row-major arrays):
//   { "format": "admmflow-problem", "version": 1, "n", "m",
//     "M_f": [n*n], "q_f": [n], "M_g": [m*m], "q_g": [m], "A": [m*n],
//     "seed": uint | null, "generator_params": {...} | null }
//
// CSV columns:
//   discrete solvers     k,t,V_gap,primal_residual,x_norm
//   first-order flow     t,V_gap,x_norm
//   second-order flow    t,V_gap,hamiltonian,x_norm,xdot_norm
//   monitors             t,E,decay_ok,residual
//   rate summary         slope,C,window_lo,window_hi,n_samples
// A run that diverged ends with a "#truncated,..." marker row.

#ifndef ADMMFLOW_IO_HPP_
#define ADMMFLOW_IO_HPP_

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "admmflow/analysis.hpp"
#include "admmflow/errors.hpp"
#include "admmflow/problem.hpp"
#include "admmflow/trajectory.hpp"

namespace admmflow {

inline constexpr const char* kProblemFormat = "admmflow-problem";
inline constexpr int kProblemFormatVersion = 1;

namespace detail {

inline std::vector<double> flatten(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

inline Matrix unflatten(const nlohmann::json& arr, Eigen::Index rows, Eigen::Index cols,
                        const char* field) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows * cols)) {
    throw InvalidArgument(std::string("problem file: field ") + field + " must hold " +
                          std::to_string(rows * cols) + " numbers");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = arr.at(static_cast<std::size_t>(i * cols + j)).get<double>();
  return m;
}

/// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline nlohmann::ordered_json problem_to_json(const SplitProblem& problem) {
  if (!problem.is_quadratic()) {
    throw UnsupportedClass("problem_to_json: only quadratic f and g can be serialized");
  }
  const auto& f = *problem.f().quadratic();
  const auto& g = *problem.g().quadratic();
  nlohmann::ordered_json j;
  j["format"] = kProblemFormat;
  j["version"] = kProblemFormatVersion;
  j["n"] = problem.n();
  j["m"] = problem.m();
  j["M_f"] = detail::flatten(f.hessian());
  j["q_f"] = detail::flatten(f.linear());
  j["M_g"] = detail::flatten(g.hessian());
  j["q_g"] = detail::flatten(g.linear());
  j["A"] = detail::flatten(problem.A());
  if (const auto& p = problem.generator_params()) {
    j["seed"] = p->seed;
    j["generator_params"] = {{"n", p->n},           {"m", p->m},
                             {"zero_eigs", p->zero_eigs}, {"eig_hi", p->eig_hi},
                             {"cond_A", p->cond_A}};
  } else {
    j["seed"] = nullptr;
    j["generator_params"] = nullptr;
  }
  return j;
}

inline SplitProblem problem_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != kProblemFormat) {
      throw InvalidArgument("problem file: missing or unknown \"format\" tag");
    }
    const auto n = j.at("n").get<Eigen::Index>();
    const auto m = j.at("m").get<Eigen::Index>();
    if (n < 1 || m < n) throw InvalidArgument("problem file: need m >= n >= 1");
    SplitProblem problem(
        QuadraticFunction(detail::unflatten(j.at("M_f"), n, n, "M_f"),
                          detail::unflatten(j.at("q_f"), n, 1, "q_f")),
        QuadraticFunction(detail::unflatten(j.at("M_g"), m, m, "M_g"),
                          detail::unflatten(j.at("q_g"), m, 1, "q_g")),
        detail::unflatten(j.at("A"), m, n, "A"));
    if (j.contains("generator_params") && j["generator_params"].is_object()) {
      const auto& gp = j["generator_params"];
      Figure1Params p;
      p.n = gp.at("n").get<Eigen::Index>();
      p.m = gp.at("m").get<Eigen::Index>();
      p.zero_eigs = gp.at("zero_eigs").get<Eigen::Index>();
      p.eig_hi = gp.at("eig_hi").get<double>();
      p.cond_A = gp.at("cond_A").get<double>();
      p.seed = j.at("seed").get<std::uint64_t>();
      problem.set_generator_params(p);
    }
    return problem;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("problem file: ") + e.what());
  }
}

inline void save_problem(const SplitProblem& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << problem_to_json(problem).dump(2) << '\n';
  if (!out) throw Error("failed writing " + path);
}

inline SplitProblem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open problem file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("problem file " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

/// Writes the CSV layout matching traj.method.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  using detail::format_double;
  switch (traj.method) {
    case Method::kAdmm:
    case Method::kAccAdmm:
      out << "k,t,V_gap,primal_residual,x_norm\n";
      for (const auto& s : traj.samples) {
        out << s.k << ',' << format_double(s.t) << ',' << format_double(s.v_gap) << ','
            << format_double(s.primal_residual.value_or(0.0)) << ','
            << format_double(s.x.norm()) << '\n';
      }
      break;
    case Method::kAdmmFlow:
      out << "t,V_gap,x_norm\n";
      for (const auto& s : traj.samples) {
        out << format_double(s.t) << ',' << format_double(s.v_gap) << ','
            << format_double(s.x.norm()) << '\n';
      }
      break;
    case Method::kAccAdmmFlow:
      out << "t,V_gap,hamiltonian,x_norm,xdot_norm\n";
      for (const auto& s : traj.samples) {
        out << format_double(s.t) << ',' << format_double(s.v_gap) << ','
            << format_double(s.hamiltonian.value_or(0.0)) << ',' << format_double(s.x.norm())
            << ',' << format_double(s.xdot ? s.xdot->norm() : 0.0) << '\n';
      }
      break;
  }
  if (traj.truncated) {
    out << "#truncated,diverged after t=" << format_double(traj.empty() ? 0.0 : traj.back().t)
        << '\n';
  }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  write_trajectory_csv(out, traj);
}

inline void write_monitor_csv(std::ostream& out, const std::vector<LyapunovSample>& samples) {
  using detail::format_double;
  out << "t,E,decay_ok,residual\n";
  for (const auto& s : samples) {
    out << format_double(s.t) << ',' << format_double(s.value) << ',' << (s.decay_ok ? 1 : 0)
        << ',' << format_double(s.residual) << '\n';
  }
}

inline void write_monitor_csv(const std::string& path, const std::vector<LyapunovSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  write_monitor_csv(out, samples);
}

inline constexpr const char* kRateSummaryHeader = "slope,C,window_lo,window_hi,n_samples";

inline std::string format_rate_summary(const RateFit& fit) {
  using detail::format_double;
  return format_double(fit.slope) + ',' + format_double(fit.C) + ',' +
         format_double(fit.window.lo) + ',' + format_double(fit.window.hi) + ',' +
         std::to_string(fit.n_samples);
}

/// (t, V_gap) columns of any trajectory CSV written above.
struct GapSeries {
  std::vector<double> t;
  std::vector<double> gap;
};

inline GapSeries read_gap_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("trajectory CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int t_col = -1, gap_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") t_col = static_cast<int>(i);
    if (header[i] == "V_gap") gap_col = static_cast<int>(i);
  }
  if (t_col < 0 || gap_col < 0) {
    throw InvalidArgument("trajectory CSV needs \"t\" and \"V_gap\" columns");
  }
  GapSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw InvalidArgument("trajectory CSV line " + std::to_string(line_no) +
                            ": wrong number of columns");
    }
    try {
      series.t.push_back(std::stod(cells[static_cast<std::size_t>(t_col)]));
      series.gap.push_back(std::stod(cells[static_cast<std::size_t>(gap_col)]));
    } catch (const std::exception&) {
      throw InvalidArgument("trajectory CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return series;
}

inline GapSeries read_gap_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open trajectory CSV " + path);
  return read_gap_series(in);
}

}  // namespace admmflow

#endif  // ADMMFLOW_IO_HPP_
