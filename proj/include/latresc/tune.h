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

// Coefficient search: minimizes the corpus WER of SelectBest over fixed
// candidate lists with CMA-ES.

#ifndef LATRESC_TUNE_H_
#define LATRESC_TUNE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latresc/combine.h"
#include "latresc/nbest.h"
#include "latresc/wer.h"

namespace latresc {

struct TuneOptions {
  std::optional<double> sigma0;  // default 0.3 * |init|, or 0.3
  int64_t budget = 2000;         // objective evaluations
  int population = 0;            // 0: 4 + floor(3 ln d)
  uint64_t seed = 1;
  bool freeze_kappa = false;
  int jobs = 1;
};

struct TuneReport {
  Coefficients best_coeffs;
  Coefficients init_coeffs;
  double init_wer = 0.0;
  double dev_wer = 0.0;  // never above init_wer
  int64_t evaluations = 0;
  // Best-ever WER after each generation, starting from init_wer.
  std::vector<double> history;
  // Names of the tuned coordinates, in vector order.
  std::vector<std::string> parameters;
  std::string note;

  std::string ToJson() const;
};

// The tuned vector is [gamma, weights of init.stream_weights in name order,
// kappa]; kappa is left out when frozen. Every stream in init must be present
// on every hypothesis.
TuneReport TuneCmaes(const std::vector<NBestList>& candidates, const Transcripts& refs,
                     const Coefficients& init, const TuneOptions& options = {});

// Corpus WER of SelectBest under `coeffs`.
double SelectionWer(const std::vector<NBestList>& candidates, const Transcripts& refs,
                    const Coefficients& coeffs);

}  // namespace latresc

#endif  // LATRESC_TUNE_H_
