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

// Interpolated absolute-discounting n-gram model.
//
// The predicted vocabulary V is every training token plus "</s>" ("<s>" is
// context only). With discount D, context h and its one-word-shorter suffix
// h':
//
//   P(w | h) = max(c(h w) - D, 0) / c(h) + D * N1+(h .) / c(h) * P(w | h')
//
// falling back to P(w | h') when c(h) = 0, and bottoming out at the uniform
// 1/|V|. Each conditional sums to one over V. Words outside V get the unk
// floor.

#ifndef LATRESC_NGRAM_SCORER_H_
#define LATRESC_NGRAM_SCORER_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "latresc/scorer.h"

namespace latresc {

struct NgramOptions {
  int order = 3;
  double discount = 0.75;
  double unk_floor = kDefaultUnkFloor;
};

class NgramScorer : public Scorer {
 public:
  // `corpus` holds one whitespace-tokenized sentence per line.
  static NgramScorer Train(std::string_view corpus, const NgramOptions& options);

  // Model file: a header line followed by one "<count> w1 .. wk" line per
  // n-gram, k = 1..order.
  static NgramScorer Load(std::string_view model_text);
  std::string Save() const;

  std::string Name() const override { return "ngram"; }
  bool TimeSensitive() const override { return false; }
  ScorerState BeginUtterance(std::string_view utterance_id, int64_t duration_frames) const override;
  StepResult ScoreWord(const ScorerState& state, std::string_view word,
                       int64_t node_time) const override;
  double Finish(const ScorerState& state) const override;

  // Probability (not log) of `word` after `context`, where context is the
  // token sequence including a leading "<s>" if wanted. Only the last
  // order-1 tokens are used. Returns 0 for words outside the vocabulary.
  double Prob(std::span<const std::string> context, std::string_view word) const;

  // Predicted vocabulary in id order; includes "</s>".
  const std::vector<std::string>& vocabulary() const { return words_; }
  const NgramOptions& options() const { return options_; }

 private:
  struct ContextStats {
    double total = 0;
    std::map<int, double> counts;  // next word id -> count
  };

  NgramScorer() = default;
  int Intern(std::string_view word);
  int Lookup(std::string_view word) const;  // -1 when unknown
  void AddCount(const std::vector<int>& context, int word, double count);
  void Finalize();
  double ProbIds(std::span<const int> context, int word) const;

  NgramOptions options_;
  std::vector<std::string> words_;  // ids >= 0; "<s>" is kept separately
  std::unordered_map<std::string, int> ids_;
  int sentence_start_id_ = -2;
  int sentence_end_id_ = -1;
  int num_predicted_ = 0;
  std::map<std::vector<int>, ContextStats> stats_;
};

}  // namespace latresc

#endif  // LATRESC_NGRAM_SCORER_H_
