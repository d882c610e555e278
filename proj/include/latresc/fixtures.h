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

// Seeded synthetic data for demos and end-to-end checks. Everything here is
// a pure function of the seed.

#ifndef LATRESC_FIXTURES_H_
#define LATRESC_FIXTURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "latresc/lattice.h"
#include "latresc/nbest.h"
#include "latresc/wer.h"

namespace latresc {

struct TuningCorpus {
  std::vector<NBestList> candidates;
  Transcripts refs;
  // Streams present on every hypothesis besides "ac" and "lm".
  std::vector<std::string> streams;
};

// N-best lists around a reference sentence. "oracle" scores 1 on the
// reference and 0 elsewhere; "rnnlm" and "lsync_rnn" are noise. First-pass
// scores prefer a corrupted hypothesis in most utterances, so the first-pass
// selection has a clearly positive WER that a good weighting removes.
TuningCorpus SyntheticTuningCorpus(uint64_t seed, int num_utterances);

struct DemoCorpus {
  std::vector<Lattice> lattices;
  Transcripts refs;
  std::string lm_text;  // training sentences for an n-gram scorer
};

// Small lattices built around reference sentences from a toy grammar, with
// competing word arcs, an occasional "!NULL" node, and first-pass scores
// that sometimes favor an error.
DemoCorpus SyntheticDemoCorpus(uint64_t seed, int num_utterances);

// Single-path lattice where "i think" occurs twice, 350 frames apart. The
// second occurrence only gets a correct time-sensitive score if the cache
// keeps the two apart.
Lattice RepeatedPhraseLattice();

}  // namespace latresc

#endif  // LATRESC_FIXTURES_H_
