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

#include <cmath>

#include <gtest/gtest.h>

#include "json.hpp"
#include "latresc/errors.h"
#include "latresc/fixtures.h"
#include "latresc/tune.h"

namespace latresc {
namespace {

double Sphere(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

double Rosenbrock(const std::vector<double>& x) {
  double s = 0;
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    s += 100 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1 - x[i], 2);
  }
  return s;
}

TEST(Cmaes, Sphere5d) {
  CmaesOptions opt;
  opt.max_evaluations = 5000;
  opt.seed = 42;
  const auto r = MinimizeCmaes(Sphere, std::vector<double>(5, 1.0), opt);
  EXPECT_LT(r.best_f, 1e-8);
  EXPECT_LE(r.evaluations, 5000);
  EXPECT_NEAR(Sphere(r.best_x), r.best_f, 0.0);
}

TEST(Cmaes, Rosenbrock5d) {
  CmaesOptions opt;
  opt.max_evaluations = 50000;
  opt.seed = 7;
  opt.ftarget = 1e-10;
  const auto r = MinimizeCmaes(Rosenbrock, std::vector<double>(5, 0.0), opt);
  EXPECT_LT(r.best_f, 1e-6);
  EXPECT_LE(r.evaluations, 50000);
  for (double v : r.best_x) EXPECT_NEAR(v, 1.0, 1e-2);
}

TEST(Cmaes, ShiftedSphereManySeeds) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    CmaesOptions opt;
    opt.seed = seed;
    opt.max_evaluations = 5000;
    auto f = [](const std::vector<double>& x) {
      double s = 0;
      for (size_t i = 0; i < x.size(); ++i) s += (x[i] - 0.5 * i) * (x[i] - 0.5 * i);
      return s;
    };
    EXPECT_LT(MinimizeCmaes(f, std::vector<double>(5, 0.0), opt).best_f, 1e-8) << seed;
  }
}

TEST(Cmaes, DeterministicAndIndependentOfJobs) {
  CmaesOptions opt;
  opt.max_evaluations = 600;
  opt.seed = 3;
  const auto a = MinimizeCmaes(Rosenbrock, std::vector<double>(4, 0.0), opt);
  const auto b = MinimizeCmaes(Rosenbrock, std::vector<double>(4, 0.0), opt);
  opt.jobs = 4;
  const auto c = MinimizeCmaes(Rosenbrock, std::vector<double>(4, 0.0), opt);
  EXPECT_EQ(a.best_x, b.best_x);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.best_x, c.best_x);
  EXPECT_EQ(a.evaluations, c.evaluations);
}

TEST(Cmaes, HistoryIsMonotoneAndBudgetRespected) {
  CmaesOptions opt;
  opt.max_evaluations = 777;
  const auto r = MinimizeCmaes(Rosenbrock, std::vector<double>(5, 0.0), opt);
  EXPECT_LE(r.evaluations, 777);
  ASSERT_FALSE(r.history.empty());
  for (size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
  EXPECT_EQ(r.history.back(), r.best_f);
}

TEST(Cmaes, DefaultPopulationAndSigma) {
  // One generation only: evaluations equal the default population size.
  CmaesOptions opt;
  opt.max_evaluations = 8;
  opt.restarts = false;
  const auto r = MinimizeCmaes(Sphere, std::vector<double>(5, 0.0), opt);
  EXPECT_EQ(r.evaluations, 4 + static_cast<int>(std::floor(3 * std::log(5.0))));
  EXPECT_EQ(r.evaluations, 8);
  EXPECT_THROW(MinimizeCmaes(Sphere, {}, opt), Error);
  opt.sigma0 = -1;
  EXPECT_THROW(MinimizeCmaes(Sphere, {1.0}, opt), Error);
}

Coefficients FirstPassOnly(const TuningCorpus& corpus) {
  Coefficients c;
  for (const auto& s : corpus.streams) c.stream_weights[s] = 0.0;
  return c;
}

TEST(Tune, OracleStreamReducesWer) {
  const TuningCorpus corpus = SyntheticTuningCorpus(5, 40);
  const Coefficients init = FirstPassOnly(corpus);
  TuneOptions opt;
  opt.budget = 1000;
  const TuneReport r = TuneCmaes(corpus.candidates, corpus.refs, init, opt);
  EXPECT_EQ(r.parameters.size(), 5u);
  EXPECT_GT(r.init_wer, 0.0);
  EXPECT_LT(r.dev_wer, r.init_wer);
  EXPECT_DOUBLE_EQ(SelectionWer(corpus.candidates, corpus.refs, r.best_coeffs), r.dev_wer);
  EXPECT_DOUBLE_EQ(SelectionWer(corpus.candidates, corpus.refs, init), r.init_wer);
  EXPECT_LE(r.evaluations, 1000);
  EXPECT_EQ(r.history.front(), r.init_wer);
  for (size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
}

TEST(Tune, SelectionWerAgreesWithSelectBest) {
  const TuningCorpus corpus = SyntheticTuningCorpus(9, 25);
  Coefficients c = Coefficients::ParseInline("gamma=0.7,kappa=0.2,rnnlm=0.1,lsync_rnn=-0.2,oracle=0.4");
  Transcripts hyps;
  for (const auto& list : corpus.candidates) hyps[list.utterance_id] = SelectBest(list, c).words;
  EXPECT_DOUBLE_EQ(SelectionWer(corpus.candidates, corpus.refs, c),
                   *ComputeCorpusWer(corpus.refs, hyps).total.rate());
}

TEST(Tune, NeverWorseThanInit) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const TuningCorpus corpus = SyntheticTuningCorpus(seed, 15);
    // A good starting point that random search is unlikely to beat.
    Coefficients init = FirstPassOnly(corpus);
    init.stream_weights["oracle"] = 50;
    TuneOptions opt;
    opt.budget = 200;
    opt.seed = seed;
    const TuneReport r = TuneCmaes(corpus.candidates, corpus.refs, init, opt);
    EXPECT_LE(r.dev_wer, r.init_wer);
    EXPECT_DOUBLE_EQ(SelectionWer(corpus.candidates, corpus.refs, r.best_coeffs), r.dev_wer);
  }
}

TEST(Tune, FreezeKappa) {
  const TuningCorpus corpus = SyntheticTuningCorpus(6, 20);
  Coefficients init = FirstPassOnly(corpus);
  init.kappa = 0.25;
  TuneOptions opt;
  opt.freeze_kappa = true;
  opt.budget = 300;
  const TuneReport r = TuneCmaes(corpus.candidates, corpus.refs, init, opt);
  EXPECT_EQ(r.parameters.size(), 4u);
  EXPECT_EQ(r.best_coeffs.kappa, 0.25);
}

TEST(Tune, SingletonCandidatesReturnInit) {
  TuningCorpus corpus = SyntheticTuningCorpus(7, 10);
  for (auto& list : corpus.candidates) list.hypotheses.resize(1);
  const Coefficients init = FirstPassOnly(corpus);
  const TuneReport r = TuneCmaes(corpus.candidates, corpus.refs, init, {});
  EXPECT_EQ(r.best_coeffs, init);
  EXPECT_EQ(r.evaluations, 4 + static_cast<int>(std::floor(3 * std::log(5.0))));
  EXPECT_FALSE(r.note.empty());
  EXPECT_EQ(r.dev_wer, r.init_wer);
}

TEST(Tune, ReportJson) {
  const TuningCorpus corpus = SyntheticTuningCorpus(8, 10);
  TuneOptions opt;
  opt.budget = 100;
  const TuneReport r = TuneCmaes(corpus.candidates, corpus.refs, FirstPassOnly(corpus), opt);
  const auto j = nlohmann::json::parse(r.ToJson());
  EXPECT_EQ(j.at("evaluations").get<int64_t>(), r.evaluations);
  EXPECT_DOUBLE_EQ(j.at("dev_wer").get<double>(), r.dev_wer);
  EXPECT_EQ(j.at("history").size(), r.history.size());
  EXPECT_EQ(Coefficients::FromJson(r.ToJson()), r.best_coeffs);
}

TEST(Tune, Errors) {
  const TuningCorpus corpus = SyntheticTuningCorpus(8, 5);
  TuneOptions opt;
  opt.budget = 3;
  EXPECT_THROW(TuneCmaes(corpus.candidates, corpus.refs, FirstPassOnly(corpus), opt), Error);
  Transcripts refs = corpus.refs;
  refs.erase(refs.begin());
  EXPECT_THROW(TuneCmaes(corpus.candidates, refs, FirstPassOnly(corpus), {}), Error);
  Coefficients extra = FirstPassOnly(corpus);
  extra.stream_weights["absent"] = 1;
  EXPECT_THROW(TuneCmaes(corpus.candidates, corpus.refs, extra, {}), Error);
  EXPECT_THROW(TuneCmaes({}, corpus.refs, extra, {}), Error);
}

}  // namespace
}  // namespace latresc
