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

#include "latresc/cmaes.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "latresc/errors.h"

namespace latresc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void EvaluateAll(const Objective& f, const std::vector<std::vector<double>>& xs,
                 std::vector<double>& values, int jobs) {
  values.assign(xs.size(), 0.0);
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(xs.size())));
  if (workers == 1) {
    for (size_t k = 0; k < xs.size(); ++k) values[k] = f(xs[k]);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (size_t k = t; k < xs.size(); k += workers) values[k] = f(xs[k]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

CmaesResult MinimizeCmaes(const Objective& f, const std::vector<double>& x0,
                          const CmaesOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) throw Error("CMA-ES needs at least one dimension");
  for (double v : x0) {
    if (!std::isfinite(v)) throw Error("CMA-ES initial point is not finite");
  }
  const VectorXd xstart = Eigen::Map<const VectorXd>(x0.data(), n);
  double sigma0 = 0.0;
  if (options.sigma0) {
    sigma0 = *options.sigma0;
  } else {
    const double norm = xstart.norm();
    sigma0 = norm > 0.0 ? 0.3 * norm : 0.3;
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw Error("CMA-ES sigma0 must be positive");
  const int default_lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  int lambda = options.population > 0 ? options.population : default_lambda;
  if (lambda < 2) throw Error("CMA-ES population must be at least 2");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CmaesResult result;
  result.best_x = x0;
  result.best_f = std::numeric_limits<double>::infinity();

  const double chi_n = std::sqrt(static_cast<double>(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  for (;;) {
    // Strategy parameters for this run.
    const int mu = lambda / 2;
    VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();
    const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double cs = (mueff + 2.0) / (n + mueff + 5.0);
    const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;

    VectorXd mean = xstart;
    double sigma = sigma0;
    VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
    MatrixXd B = MatrixXd::Identity(n, n);
    VectorXd D = VectorXd::Ones(n);
    MatrixXd C = MatrixXd::Identity(n, n);
    int64_t run_evals = 0;
    std::vector<double> recent_best;  // per-generation best of this run
    const size_t flat_window = 10 + static_cast<size_t>(std::ceil(30.0 * n / lambda));
    std::string stop;

    while (stop.empty()) {
      if (result.evaluations + lambda > options.max_evaluations) {
        stop = "budget";
        break;
      }
      std::vector<VectorXd> ys(lambda);
      std::vector<std::vector<double>> xs(lambda);
      for (int k = 0; k < lambda; ++k) {
        VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = gauss(rng);
        ys[k] = B * D.asDiagonal() * z;
        const VectorXd x = mean + sigma * ys[k];
        xs[k].assign(x.data(), x.data() + n);
      }
      std::vector<double> values;
      EvaluateAll(f, xs, values, options.jobs);
      result.evaluations += lambda;
      run_evals += lambda;
      ++result.generations;

      std::vector<int> rank(lambda);
      std::iota(rank.begin(), rank.end(), 0);
      std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
        // NaN sorts last.
        if (std::isnan(values[a])) return false;
        if (std::isnan(values[b])) return true;
        return values[a] < values[b];
      });
      const double gen_best = values[rank[0]];
      if (gen_best < result.best_f) {
        result.best_f = gen_best;
        result.best_x = xs[rank[0]];
      }
      result.history.push_back(result.best_f);
      if (options.ftarget && result.best_f <= *options.ftarget) {
        stop = "ftarget";
        break;
      }

      // Mean and evolution paths.
      const VectorXd old_mean = mean;
      VectorXd y_w = VectorXd::Zero(n);
      for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[rank[i]];
      mean = old_mean + sigma * y_w;
      const MatrixXd inv_sqrt_c = B * D.cwiseInverse().asDiagonal() * B.transpose();
      ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_c * y_w);
      const double generations_in_run = static_cast<double>(run_evals) / lambda;
      const bool hsig = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * generations_in_run)) / chi_n <
                        1.4 + 2.0 / (n + 1.0);
      pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

      // Covariance: rank-one plus rank-mu update.
      MatrixXd rank_mu = MatrixXd::Zero(n, n);
      for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys[rank[i]] * ys[rank[i]].transpose();
      C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
      C = 0.5 * (C + C.transpose());
      sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));

      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C);
      if (eig.info() != Eigen::Success) {
        stop = "eigendecomposition failed";
        break;
      }
      B = eig.eigenvectors();
      D = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();

      // Per-run termination.
      recent_best.push_back(gen_best);
      if (recent_best.size() > flat_window) recent_best.erase(recent_best.begin());
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      const auto [rlo, rhi] = std::minmax_element(recent_best.begin(), recent_best.end());
      const double fun_range = std::max(*hi, *rhi) - std::min(*lo, *rlo);
      if (!std::isfinite(sigma) || D.minCoeff() <= 0.0) {
        stop = "numerical breakdown";
      } else if (recent_best.size() >= flat_window && fun_range <= options.tol_fun) {
        stop = "tolfun";
      } else if (sigma * std::max(pc.cwiseAbs().maxCoeff(), C.diagonal().cwiseSqrt().maxCoeff()) < options.tol_x) {
        stop = "tolx";
      } else if (D.maxCoeff() > 1e7 * D.minCoeff()) {
        stop = "condition";
      }
    }
    result.stop_reason = stop;
    if (stop == "budget" || stop == "ftarget" || !options.restarts) break;
    if (result.evaluations + 2 * lambda > options.max_evaluations) {
      result.stop_reason = "budget";
      break;
    }
    lambda *= 2;
    ++result.restarts;
  }
  return result;
}

}  // namespace latresc
