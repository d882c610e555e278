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

// Word error rate by Levenshtein alignment with unit costs. Words are
// compared case-insensitively; "<s>", "</s>" and "!NULL" are dropped first.

#ifndef LATRESC_WER_H_
#define LATRESC_WER_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latresc {

struct WerCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_words = 0;

  int errors() const { return substitutions + insertions + deletions; }
  // Unset when there are no reference words.
  std::optional<double> rate() const;

  WerCounts& operator+=(const WerCounts& other);
  bool operator==(const WerCounts&) const = default;
};

enum class EditOp { kMatch, kSubstitution, kInsertion, kDeletion };

struct Alignment {
  WerCounts counts;
  std::vector<EditOp> ops;  // in reference order
};

// Backtrace prefers match/substitution, then insertion, then deletion.
Alignment Align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);
WerCounts Wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

using Transcripts = std::map<std::string, std::vector<std::string>>;

struct CorpusWer {
  WerCounts total;  // pooled over utterances
  std::map<std::string, WerCounts> per_utterance;
};

// Throws Error listing ids present on one side only.
CorpusWer ComputeCorpusWer(const Transcripts& refs, const Transcripts& hyps);

struct LengthBucket {
  int min_words = 0;
  std::optional<int> max_words;  // exclusive; unset for the open last bucket
  int num_utterances = 0;
  WerCounts baseline;
  WerCounts system;
  // (WER_base - WER_sys) / WER_base over pooled counts; unset for an empty
  // bucket or one with no baseline errors.
  std::optional<double> werr;
};

// `edges` are ascending word counts; with edges {5,10} the buckets are
// [0,5), [5,10) and [10,inf), keyed by reference length.
std::vector<LengthBucket> WerrByLength(const Transcripts& refs, const Transcripts& baseline,
                                       const Transcripts& system, const std::vector<int>& edges);

// "UTT=<id> :: w1 w2 ..." per line.
Transcripts ParseTranscripts(std::string_view text);
std::string SerializeTranscripts(const Transcripts& transcripts);

}  // namespace latresc

#endif  // LATRESC_WER_H_
