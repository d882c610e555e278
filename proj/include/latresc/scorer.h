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

// Auto-regressive sequence scorers.
//
// A scorer assigns log P(w_t | w_1..w_{t-1}, utterance) one word at a time,
// so that the log-probability of a whole sequence is the sum of per-word
// conditionals plus the sentence-end term. Text-only language models and
// audio-grounded label-synchronous models share this contract; the latter
// see the audio only through the utterance id and the word's frame time.

#ifndef LATRESC_SCORER_H_
#define LATRESC_SCORER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace latresc {

inline constexpr double kDefaultUnkFloor = -20.0;

// Immutable, shareable handle to a scorer's internal state. Extending a state
// never mutates it, so one state may be extended along many lattice branches.
class ScorerState {
 public:
  ScorerState() = default;

  template <typename T>
  static ScorerState Make(T value) {
    return ScorerState(std::make_shared<const T>(std::move(value)));
  }

  // The caller must request the type the owning scorer stored.
  template <typename T>
  const T& Get() const {
    return *static_cast<const T*>(impl_.get());
  }

  bool empty() const { return impl_ == nullptr; }

 private:
  explicit ScorerState(std::shared_ptr<const void> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const void> impl_;
};

struct StepResult {
  ScorerState state;  // the input state with the word appended
  double logprob = 0.0;
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::string Name() const = 0;

  // Whether ScoreWord depends on node_time. Drives the rescoring cache's
  // timestamp level.
  virtual bool TimeSensitive() const = 0;

  // State for the empty history right after "<s>".
  virtual ScorerState BeginUtterance(std::string_view utterance_id,
                                     int64_t duration_frames) const = 0;

  virtual StepResult ScoreWord(const ScorerState& state, std::string_view word,
                               int64_t node_time) const = 0;

  // log P("</s>" | history).
  virtual double Finish(const ScorerState& state) const = 0;

  // BeginUtterance, then ScoreWord over `words`, then Finish (when
  // `with_eos`). times[i], when given, is the frame of words[i]; otherwise 0.
  virtual double ScoreSequence(std::string_view utterance_id, std::span<const std::string> words,
                               std::span<const int64_t> times = {}, bool with_eos = true) const;
};

// Every word (and the sentence end) gets -ln(vocab_size).
class UniformScorer : public Scorer {
 public:
  explicit UniformScorer(double vocab_size);

  std::string Name() const override { return "uniform"; }
  bool TimeSensitive() const override { return false; }
  ScorerState BeginUtterance(std::string_view utterance_id, int64_t duration_frames) const override;
  StepResult ScoreWord(const ScorerState& state, std::string_view word,
                       int64_t node_time) const override;
  double Finish(const ScorerState& state) const override;

  double logprob() const { return logprob_; }

 private:
  double logprob_;
};

// Test scorer whose conditionals depend on both the consumed history and the
// frame times, mimicking an attention context tied to the audio:
//
//   logprob = -(1 + 0.01 * (len(history) mod 10) + 0.002 * |t - t_last|)
//
// where t_last is the frame of the last consumed word (0 at the start).
class MockTimeScorer : public Scorer {
 public:
  std::string Name() const override { return "mock-time"; }
  bool TimeSensitive() const override { return true; }
  ScorerState BeginUtterance(std::string_view utterance_id, int64_t duration_frames) const override;
  StepResult ScoreWord(const ScorerState& state, std::string_view word,
                       int64_t node_time) const override;
  double Finish(const ScorerState& state) const override;
};

}  // namespace latresc

#endif  // LATRESC_SCORER_H_
