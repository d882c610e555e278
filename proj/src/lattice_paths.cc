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

#include "latresc/lattice_paths.h"

#include <fmt/format.h>

namespace latresc {

double ArcCombinedScore(const Lattice& lattice, const Arc& arc, const Coefficients& coeffs) {
  double score = arc.ac_score + coeffs.gamma * arc.lm_score;
  for (const auto& [stream, weight] : coeffs.stream_weights) {
    auto it = arc.model_scores.find(stream);
    if (it == arc.model_scores.end()) {
      throw Error(fmt::format("lattice {}: arc {} has no '{}' score", lattice.utterance_id,
                              arc.id, stream));
    }
    score += weight * it->second;
  }
  if (!IsNonWord(lattice.nodes[arc.dest].word)) score += coeffs.kappa;
  return score;
}

std::vector<double> ArcCombinedScores(const Lattice& lattice, const Coefficients& coeffs) {
  std::vector<double> scores;
  scores.reserve(lattice.arcs.size());
  for (const Arc& arc : lattice.arcs) scores.push_back(ArcCombinedScore(lattice, arc, coeffs));
  return scores;
}

Hypothesis HypothesisFromArcs(const Lattice& lattice, std::span<const int> arc_path) {
  Hypothesis hyp;
  hyp.utterance_id = lattice.utterance_id;
  double ac = 0.0, lm = 0.0;
  std::map<std::string, double> streams;
  std::map<std::string, size_t> seen;
  for (int a : arc_path) {
    const Arc& arc = lattice.arcs[a];
    ac += arc.ac_score;
    lm += arc.lm_score;
    for (const auto& [stream, score] : arc.model_scores) {
      streams[stream] += score;
      ++seen[stream];
    }
    const std::string& word = lattice.nodes[arc.dest].word;
    if (!IsNonWord(word)) hyp.words.push_back(word);
  }
  hyp.scores[std::string(kAcStream)] = ac;
  hyp.scores[std::string(kLmStream)] = lm;
  for (const auto& [stream, total] : streams) {
    if (seen[stream] == arc_path.size()) hyp.scores[stream] = total;
  }
  hyp.num_words = static_cast<int>(hyp.words.size());
  return hyp;
}

}  // namespace latresc
