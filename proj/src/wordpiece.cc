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

#include "latresc/wordpiece.h"

#include <algorithm>

#include "latresc/errors.h"

namespace latresc {

bool WordPieceVocab::CoversAlphabet(std::string_view alphabet) const {
  return std::all_of(alphabet.begin(), alphabet.end(),
                     [&](char c) { return pieces.contains(std::string_view(&c, 1)); });
}

std::vector<std::string> Tokenize(const WordPieceVocab& vocab, std::string_view word) {
  size_t longest = 0;
  for (const auto& p : vocab.pieces) longest = std::max(longest, p.size());

  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < word.size()) {
    size_t len = std::min(longest, word.size() - pos);
    for (; len > 0; --len) {
      if (vocab.pieces.contains(word.substr(pos, len))) break;
    }
    if (len == 0) return {std::string(kUnkPiece)};
    out.emplace_back(word.substr(pos, len));
    pos += len;
  }
  return out;
}

WordPieceScorer::WordPieceScorer(WordPieceVocab vocab, std::shared_ptr<const Scorer> piece_scorer)
    : vocab_(std::move(vocab)), piece_scorer_(std::move(piece_scorer)) {
  if (!piece_scorer_) throw Error("word-piece scorer needs a piece-level scorer");
}

ScorerState WordPieceScorer::BeginUtterance(std::string_view utterance_id,
                                            int64_t duration_frames) const {
  return piece_scorer_->BeginUtterance(utterance_id, duration_frames);
}

StepResult WordPieceScorer::ScoreWord(const ScorerState& state, std::string_view word,
                                      int64_t node_time) const {
  const auto pieces = Tokenize(vocab_, word);
  if (pieces.size() == 1 && pieces.front() == kUnkPiece && word != kUnkPiece) {
    return {state, vocab_.unk_floor};
  }
  StepResult result{state, 0.0};
  for (const auto& piece : pieces) {
    StepResult step = piece_scorer_->ScoreWord(result.state, piece, node_time);
    result.logprob += step.logprob;
    result.state = std::move(step.state);
  }
  return result;
}

double WordPieceScorer::Finish(const ScorerState& state) const {
  return piece_scorer_->Finish(state);
}

}  // namespace latresc
