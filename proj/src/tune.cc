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

#include "latresc/tune.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "latresc/cmaes.h"
#include "latresc/errors.h"

namespace latresc {

namespace {

// Candidate lists flattened to feature rows so an objective evaluation is a
// few dot products per hypothesis.
struct Utterance {
  std::vector<double> base;      // ac per hypothesis
  std::vector<double> features;  // row-major: lm, streams..., num_words
  std::vector<int> errors;       // edit errors against the reference
};

struct Problem {
  std::vector<std::string> streams;
  std::vector<Utterance> utterances;
  int ref_words = 0;
  size_t width = 0;  // features per hypothesis
};

Problem BuildProblem(const std::vector<NBestList>& candidates, const Transcripts& refs,
                     const Coefficients& init) {
  Problem p;
  for (const auto& [name, w] : init.stream_weights) p.streams.push_back(name);
  p.width = p.streams.size() + 2;

  Transcripts hyp_ids;
  for (const NBestList& list : candidates) {
    if (list.hypotheses.empty()) throw Error(fmt::format("utterance {}: no candidates", list.utterance_id));
    if (!hyp_ids.emplace(list.utterance_id, std::vector<std::string>{}).second) {
      throw Error(fmt::format("utterance {} listed twice", list.utterance_id));
    }
  }
  // Id check with the usual message.
  ComputeCorpusWer(refs, hyp_ids);

  for (const NBestList& list : candidates) {
    const auto& ref = refs.at(list.utterance_id);
    p.ref_words += Wer(ref, {}).ref_words;
    // Lexicographic order up front: argmax with a strict comparison then
    // breaks ties exactly like SelectBest.
    std::vector<const Hypothesis*> sorted;
    for (const auto& h : list.hypotheses) sorted.push_back(&h);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Hypothesis* a, const Hypothesis* b) { return WordsLess(a->words, b->words); });
    Utterance u;
    for (const Hypothesis* h : sorted) {
      auto get = [&](std::string_view name) {
        auto it = h->scores.find(std::string(name));
        if (it == h->scores.end()) {
          throw Error(fmt::format("utterance {}: missing score stream '{}'", list.utterance_id, name));
        }
        return it->second;
      };
      u.base.push_back(get(kAcStream));
      u.features.push_back(get(kLmStream));
      for (const auto& s : p.streams) u.features.push_back(get(s));
      u.features.push_back(static_cast<double>(h->num_words));
      u.errors.push_back(Wer(ref, h->words).errors());
    }
    p.utterances.push_back(std::move(u));
  }
  return p;
}

// [gamma, weights..., kappa] in feature order.
std::vector<double> FullVector(const Coefficients& c, const std::vector<std::string>& streams) {
  std::vector<double> v{c.gamma};
  for (const auto& s : streams) v.push_back(c.stream_weights.at(s));
  v.push_back(c.kappa);
  return v;
}

Coefficients FromFullVector(const std::vector<double>& v, const std::vector<std::string>& streams) {
  Coefficients c;
  c.gamma = v[0];
  for (size_t i = 0; i < streams.size(); ++i) c.stream_weights[streams[i]] = v[i + 1];
  c.kappa = v.back();
  return c;
}

int TotalErrors(const Problem& p, const std::vector<double>& coeffs) {
  int total = 0;
  for (const Utterance& u : p.utterances) {
    size_t best = 0;
    double best_score = 0.0;
    for (size_t h = 0; h < u.base.size(); ++h) {
      double s = u.base[h];
      const double* row = &u.features[h * p.width];
      for (size_t k = 0; k < p.width; ++k) s += coeffs[k] * row[k];
      if (h == 0 || s > best_score) {
        best = h;
        best_score = s;
      }
    }
    total += u.errors[best];
  }
  return total;
}

double Rate(const Problem& p, int errors) {
  return p.ref_words > 0 ? static_cast<double>(errors) / p.ref_words : 0.0;
}

}  // namespace

double SelectionWer(const std::vector<NBestList>& candidates, const Transcripts& refs,
                    const Coefficients& coeffs) {
  const Problem p = BuildProblem(candidates, refs, coeffs);
  return Rate(p, TotalErrors(p, FullVector(coeffs, p.streams)));
}

TuneReport TuneCmaes(const std::vector<NBestList>& candidates, const Transcripts& refs,
                     const Coefficients& init, const TuneOptions& options) {
  if (candidates.empty()) throw Error("no utterances to tune on");
  const Problem p = BuildProblem(candidates, refs, init);
  const std::vector<double> init_full = FullVector(init, p.streams);
  const size_t dims = options.freeze_kappa ? init_full.size() - 1 : init_full.size();

  TuneReport report;
  report.init_coeffs = init;
  report.best_coeffs = init;
  report.parameters.push_back("gamma");
  for (const auto& s : p.streams) report.parameters.push_back(s);
  if (!options.freeze_kappa) report.parameters.push_back("kappa");
  report.init_wer = Rate(p, TotalErrors(p, init_full));
  report.dev_wer = report.init_wer;

  CmaesOptions cma;
  cma.population = options.population > 0 ? options.population
                                          : 4 + static_cast<int>(std::floor(3.0 * std::log(dims)));
  cma.sigma0 = options.sigma0;
  cma.max_evaluations = options.budget;
  cma.seed = options.seed;
  cma.ftarget = 0.0;
  cma.jobs = options.jobs;
  if (options.budget < cma.population) {
    throw Error(fmt::format("budget {} is below the population size {}", options.budget, cma.population));
  }

  const bool constant = std::all_of(p.utterances.begin(), p.utterances.end(),
                                    [](const Utterance& u) { return u.base.size() == 1; });
  if (constant) {
    // One generation confirms the objective cannot move.
    cma.max_evaluations = cma.population;
    cma.restarts = false;
  }

  auto objective = [&](const std::vector<double>& x) {
    std::vector<double> full = init_full;
    std::copy(x.begin(), x.end(), full.begin());
    return Rate(p, TotalErrors(p, full));
  };
  const std::vector<double> x0(init_full.begin(), init_full.begin() + static_cast<long>(dims));
  const CmaesResult result = MinimizeCmaes(objective, x0, cma);

  report.evaluations = result.evaluations;
  report.history.push_back(report.init_wer);
  for (double h : result.history) report.history.push_back(std::min(h, report.init_wer));

  if (constant) {
    report.note = "every utterance has a single candidate; the objective is constant and the "
                  "initial coefficients are returned";
  } else if (result.best_f < report.init_wer) {
    std::vector<double> full = init_full;
    std::copy(result.best_x.begin(), result.best_x.end(), full.begin());
    report.best_coeffs = FromFullVector(full, p.streams);
    report.dev_wer = result.best_f;
    report.note = fmt::format("stopped: {}", result.stop_reason);
  } else {
    report.note = fmt::format("no improvement over the initial coefficients (stopped: {})", result.stop_reason);
  }
  return report;
}

std::string TuneReport::ToJson() const {
  nlohmann::ordered_json j;
  j["coefficients"] = nlohmann::json::parse(best_coeffs.ToJson());
  j["initial_coefficients"] = nlohmann::json::parse(init_coeffs.ToJson());
  j["dev_wer"] = dev_wer;
  j["initial_wer"] = init_wer;
  j["evaluations"] = evaluations;
  j["parameters"] = parameters;
  j["history"] = history;
  j["note"] = note;
  return j.dump(2) + "\n";
}

}  // namespace latresc
