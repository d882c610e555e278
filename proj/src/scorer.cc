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

#include "latresc/scorer.h"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "latresc/errors.h"

namespace latresc {

double Scorer::ScoreSequence(std::string_view utterance_id, std::span<const std::string> words,
                             std::span<const int64_t> times, bool with_eos) const {
  if (!times.empty() && times.size() != words.size()) {
    throw Error("ScoreSequence: times and words differ in length");
  }
  const int64_t duration = times.empty() ? 0 : times.back();
  ScorerState state = BeginUtterance(utterance_id, duration);
  double total = 0.0;
  for (size_t i = 0; i < words.size(); ++i) {
    StepResult step = ScoreWord(state, words[i], times.empty() ? 0 : times[i]);
    total += step.logprob;
    state = std::move(step.state);
  }
  if (with_eos) total += Finish(state);
  return total;
}

UniformScorer::UniformScorer(double vocab_size) {
  if (!(vocab_size >= 1.0)) throw Error(fmt::format("uniform scorer needs V >= 1, got {}", vocab_size));
  logprob_ = -std::log(vocab_size);
}

ScorerState UniformScorer::BeginUtterance(std::string_view, int64_t) const {
  return ScorerState::Make(0);
}

StepResult UniformScorer::ScoreWord(const ScorerState& state, std::string_view, int64_t) const {
  return {state, logprob_};
}

double UniformScorer::Finish(const ScorerState&) const { return logprob_; }

namespace {

struct MockState {
  int64_t length = 0;
  int64_t last_time = 0;
};

}  // namespace

ScorerState MockTimeScorer::BeginUtterance(std::string_view, int64_t) const {
  return ScorerState::Make(MockState{});
}

StepResult MockTimeScorer::ScoreWord(const ScorerState& state, std::string_view,
                                     int64_t node_time) const {
  const auto& s = state.Get<MockState>();
  const double logprob = -(1.0 + 0.01 * static_cast<double>(s.length % 10) +
                           0.002 * static_cast<double>(std::llabs(node_time - s.last_time)));
  return {ScorerState::Make(MockState{s.length + 1, node_time}), logprob};
}

double MockTimeScorer::Finish(const ScorerState& state) const {
  return -(1.0 + 0.01 * static_cast<double>(state.Get<MockState>().length % 10));
}

}  // namespace latresc
