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

// Bridge to a scorer living in a child process.
//
// The child speaks newline-delimited JSON on stdin/stdout. Requests carry the
// full history, so the child keeps no per-utterance state:
//
//   {"op":"hello"}                       -> {"name":"...","time_sensitive":false}
//   {"op":"score","utt":"u1","history":["w1","w2"],"word":"w3","time":123}
//                                        -> {"logprob":-3.141593}
//   {"op":"sequence","utt":"u1","words":["w1","w2"]}
//                                        -> {"logprob":-42.0}
//
// The sentence end is requested as a "score" op with word "</s>". A
// "sequence" reply includes the sentence-end term.

#ifndef LATRESC_EXTERNAL_SCORER_H_
#define LATRESC_EXTERNAL_SCORER_H_

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "latresc/scorer.h"

namespace latresc {

// Owns a child process and its pipes; requests on one instance are
// serialized. Open one instance per worker for parallelism.
class ExternalScorer : public Scorer {
 public:
  // Launches `command` through /bin/sh and performs the hello handshake.
  // Throws ScorerError when the process cannot be started or answers badly.
  explicit ExternalScorer(const std::string& command);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  std::string Name() const override { return name_; }
  bool TimeSensitive() const override { return time_sensitive_; }
  ScorerState BeginUtterance(std::string_view utterance_id, int64_t duration_frames) const override;
  StepResult ScoreWord(const ScorerState& state, std::string_view word,
                       int64_t node_time) const override;
  double Finish(const ScorerState& state) const override;
  double ScoreSequence(std::string_view utterance_id, std::span<const std::string> words,
                       std::span<const int64_t> times = {}, bool with_eos = true) const override;

  // Sends one request line and returns the raw reply line.
  std::string Exchange(const std::string& request_line) const;

 private:
  double RequestLogprob(const std::string& request_line) const;

  std::string command_;
  std::string name_;
  bool time_sensitive_ = false;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::string read_buffer_;
  mutable std::mutex mu_;
};

}  // namespace latresc

#endif  // LATRESC_EXTERNAL_SCORER_H_
