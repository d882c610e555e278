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

#ifndef LATRESC_WORDPIECE_H_
#define LATRESC_WORDPIECE_H_

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "latresc/scorer.h"

namespace latresc {

// Returned as the sole piece when a word cannot be covered by the vocabulary.
inline constexpr std::string_view kUnkPiece = "<unk>";

struct WordPieceVocab {
  std::set<std::string, std::less<>> pieces;
  double unk_floor = kDefaultUnkFloor;

  // True when every character of `alphabet` is itself a piece, which makes
  // tokenization total over words drawn from that alphabet.
  bool CoversAlphabet(std::string_view alphabet) const;
};

// Greedy longest match, left to right. The pieces concatenate back to the
// word, or the result is {kUnkPiece}.
std::vector<std::string> Tokenize(const WordPieceVocab& vocab, std::string_view word);

// Scores each word as the sum of its pieces under a piece-level scorer.
// Unmappable words cost vocab.unk_floor and leave the state unchanged.
class WordPieceScorer : public Scorer {
 public:
  WordPieceScorer(WordPieceVocab vocab, std::shared_ptr<const Scorer> piece_scorer);

  std::string Name() const override { return "wordpiece:" + piece_scorer_->Name(); }
  bool TimeSensitive() const override { return piece_scorer_->TimeSensitive(); }
  ScorerState BeginUtterance(std::string_view utterance_id, int64_t duration_frames) const override;
  StepResult ScoreWord(const ScorerState& state, std::string_view word,
                       int64_t node_time) const override;
  double Finish(const ScorerState& state) const override;

 private:
  WordPieceVocab vocab_;
  std::shared_ptr<const Scorer> piece_scorer_;
};

}  // namespace latresc

#endif  // LATRESC_WORDPIECE_H_
