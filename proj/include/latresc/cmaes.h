// Copyright 2026 The Latresc Authors
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

// Derivative-free minimization with the (mu/mu_w, lambda) covariance matrix
// adaptation evolution strategy.

#ifndef LATRESC_CMAES_H_
#define LATRESC_CMAES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace latresc {

struct CmaesOptions {
  // 0 means 4 + floor(3 ln d).
  int population = 0;
  // Unset means 0.3 * |x0|, or 0.3 when x0 is the origin.
  std::optional<double> sigma0;
  int64_t max_evaluations = 5000;
  // Stop as soon as a value <= ftarget is seen.
  std::optional<double> ftarget;
  uint64_t seed = 1;
  // Restart with doubled population when a run stagnates, until the budget
  // is spent.
  bool restarts = true;
  // Stop a run when the best value of the last generations spans less than
  // this.
  double tol_fun = 1e-12;
  double tol_x = 1e-12;
  // Candidates of one generation are evaluated through this many threads.
  // The objective must then be safe to call concurrently.
  int jobs = 1;
};

struct CmaesResult {
  std::vector<double> best_x;
  double best_f = 0.0;
  int64_t evaluations = 0;
  int generations = 0;
  int restarts = 0;
  // Best-ever objective after each generation.
  std::vector<double> history;
  std::string stop_reason;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Deterministic for a given seed (independent of `jobs`). Returns the
// best-ever sampled point; x0 is only the initial mean and is not evaluated.
CmaesResult MinimizeCmaes(const Objective& f, const std::vector<double>& x0,
                          const CmaesOptions& options = {});

}  // namespace latresc

#endif  // LATRESC_CMAES_H_
