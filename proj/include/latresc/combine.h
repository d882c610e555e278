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

// Log-linear combination of score streams:
//
//   S(W) = ac + gamma * lm + sum_s weight_s * score_s + kappa * |W|
//
// The acoustic weight is pinned to 1. Typical streams are "rnnlm",
// "lsync_rnn" and "lsync_tfm", but any stream name other than "ac" and "lm"
// is accepted.

#ifndef LATRESC_COMBINE_H_
#define LATRESC_COMBINE_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace latresc {

inline constexpr std::string_view kAcStream = "ac";
inline constexpr std::string_view kLmStream = "lm";

struct Coefficients {
  double gamma = 1.0;
  std::map<std::string, double> stream_weights;
  double kappa = 0.0;

  // Multiplies every coefficient, kappa included.
  Coefficients Scaled(double factor) const;

  // "gamma=1,kappa=-0.5,rnnlm=0.3"; unspecified values keep their defaults.
  static Coefficients ParseInline(std::string_view text);
  static Coefficients FromJson(std::string_view json_text);
  std::string ToJson() const;

  bool operator==(const Coefficients&) const = default;
};

struct Hypothesis {
  std::string utterance_id;
  std::vector<std::string> words;  // sentinels stripped
  std::map<std::string, double> scores;  // "ac", "lm", plus scorer streams
  int num_words = 0;

  bool operator==(const Hypothesis&) const = default;
};

// Throws Error when a stream referenced by `coeffs` is missing.
double CombinedScore(const Hypothesis& hyp, const Coefficients& coeffs);

// Sum of weights applied to a single arc's (or any) score map, without the
// insertion term. Throws Error naming the missing stream.
double WeightedStreams(const std::map<std::string, double>& scores, const Coefficients& coeffs);

// Strict ordering used to break exact score ties: lexicographic by word.
bool WordsLess(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace latresc

#endif  // LATRESC_COMBINE_H_
