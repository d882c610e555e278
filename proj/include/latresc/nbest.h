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

// N-best extraction and rescoring.
//
// N-best file format, one hypothesis per line:
//
//   UTT=<id> RANK=<k> ac=<v> lm=<v> [<stream>=<v>]* NW=<n> :: w1 w2 ... wn

#ifndef LATRESC_NBEST_H_
#define LATRESC_NBEST_H_

#include <string>
#include <string_view>
#include <vector>

#include "latresc/combine.h"
#include "latresc/lattice.h"
#include "latresc/scorer.h"

namespace latresc {

struct NBestList {
  std::string utterance_id;
  std::vector<Hypothesis> hypotheses;

  bool operator==(const NBestList&) const = default;
};

struct NBestOptions {
  // When false, every path counts separately even if it repeats a word
  // sequence already in the list.
  bool dedup = true;
};

// The n highest-scoring distinct word sequences under `coeffs`, best first;
// exact score ties are ordered lexicographically. Among paths sharing a word
// sequence the best-scoring one supplies the stream totals. Paths come out
// of a best-first search guided by exact completion scores, so no path is
// ever pruned by a beam.
NBestList ExtractNBest(const Lattice& lattice, int n, const Coefficients& coeffs,
                       const NBestOptions& options = {});

struct RescoreNBestOptions {
  bool score_eos = true;
  // Divide the stream total by the number of scored tokens (words, plus one
  // for the sentence end).
  bool length_normalize = false;
};

// Adds scores[stream_name] = ScoreSequence(words) to every hypothesis; the
// order is left unchanged.
NBestList RescoreNBest(const NBestList& nbest, const Scorer& scorer, const std::string& stream_name,
                       const RescoreNBestOptions& options = {});

// Argmax of the combined score, lexicographic tie-break. Throws on an empty
// list.
Hypothesis SelectBest(const NBestList& nbest, const Coefficients& coeffs);

std::string SerializeNBest(const NBestList& nbest);
// A file may hold several utterances; they come back in order of first
// appearance.
std::vector<NBestList> ParseNBest(std::string_view text);

}  // namespace latresc

#endif  // LATRESC_NBEST_H_
