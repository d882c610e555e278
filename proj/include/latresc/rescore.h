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

// Lattice rescoring with n-gram history clustering.
//
// The lattice is expanded on the fly so that every expanded node has a
// unique history of its last (n-1) words, and each arc is scored from a
// scorer state looked up by that clustered history. Because an audio-grounded
// scorer's state also depends on where in the utterance it was computed, the
// cache has two levels: history first, then frame time. A stored state is
// reused only for a query within `collar` frames of the time it was stored
// at; a history seen again far away in the utterance gets a fresh entry.
//
// When a cache hit comes from a path whose recent arc posteriors sum higher
// than those stored with the entry, the entry is overwritten with the state
// from the more likely path.

#ifndef LATRESC_RESCORE_H_
#define LATRESC_RESCORE_H_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "latresc/combine.h"
#include "latresc/lattice.h"
#include "latresc/scorer.h"

namespace latresc {

inline constexpr int64_t kInfiniteCollar = std::numeric_limits<int64_t>::max();

struct RescoreConfig {
  int ngram = 3;        // clustering order; histories keep ngram-1 words
  int64_t collar = 9;   // frames
  std::string stream_name = "lsync";
  bool score_eos = true;  // score "</s>" on arcs entering the end node
};

// Histories are sequences of interned word ids.
using WordHistory = std::vector<int>;

struct WordHistoryHash {
  size_t operator()(const WordHistory& h) const;
};

// Two-level store: history -> (frame time -> entry).
class RescoreCache {
 public:
  struct Entry {
    int64_t time = 0;
    ScorerState state;
    std::vector<double> post;  // recent arc posteriors along the writing path
    std::unordered_map<int, StepResult> pred;  // memoized ScoreWord per word id
    std::optional<double> eos;                 // memoized Finish

    double PostSum() const;
  };

  explicit RescoreCache(int64_t collar);

  // Entry whose stored time is nearest to `time` and within the collar; the
  // smaller stored time wins an exact tie. nullptr on a miss.
  Entry* Lookup(const WordHistory& hist, int64_t time);

  // Adds a new entry; the caller has established that Lookup misses.
  Entry& Insert(const WordHistory& hist, int64_t time, ScorerState state,
                std::vector<double> post);

  size_t size() const { return size_; }
  size_t CountFor(const WordHistory& hist) const;
  int64_t collar() const { return collar_; }

 private:
  int64_t collar_;
  size_t size_ = 0;
  std::unordered_map<WordHistory, std::map<int64_t, Entry>, WordHistoryHash> entries_;
};

struct RescoreStats {
  size_t expanded_nodes = 0;
  size_t expanded_arcs = 0;
  size_t cache_entries = 0;
  size_t cache_hits = 0;
  size_t cache_misses = 0;
  size_t cache_renewals = 0;  // hits replaced by a more likely path
  size_t scorer_calls = 0;    // ScoreWord + Finish
};

// Expands `lattice` so that every node copy has a unique history of its
// last (n-1) words ("<s>", "</s>" and "!NULL" excluded). Arc scores and
// posteriors are copied; the posteriors of the copies are dropped since they
// no longer describe the expanded graph.
Lattice ExpandNgram(const Lattice& lattice, int n);

// Expands and rescores. Every output arc carries
// model_scores[config.stream_name]; arcs into "!NULL" nodes get 0 and arcs
// into the end node get the sentence-end score (or 0 without score_eos).
// Requires arc posteriors on the input.
Lattice RescoreLattice(const Lattice& lattice, const Scorer& scorer, const RescoreConfig& config,
                       RescoreStats* stats = nullptr);

// Highest combined-score complete path, by dynamic programming over the DAG.
// Exact score ties go to the lexicographically smaller word sequence.
Hypothesis BestPath(const Lattice& lattice, const Coefficients& coeffs);

}  // namespace latresc

#endif  // LATRESC_RESCORE_H_
