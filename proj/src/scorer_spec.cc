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

#include "latresc/scorer_spec.h"

#include <charconv>

#include <fmt/format.h>

#include "latresc/errors.h"
#include "latresc/external_scorer.h"
#include "latresc/lattice_io.h"
#include "latresc/ngram_scorer.h"

namespace latresc {

std::shared_ptr<const Scorer> MakeScorer(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "mock-time" && colon == std::string::npos) return std::make_shared<MockTimeScorer>();
  if (kind == "uniform" && !arg.empty()) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw Error(fmt::format("bad vocabulary size in scorer spec '{}'", spec));
    }
    return std::make_shared<UniformScorer>(v);
  }
  if (kind == "ngram" && !arg.empty()) {
    try {
      return std::make_shared<NgramScorer>(NgramScorer::Load(ReadFile(arg)));
    } catch (const FormatError& e) {
      throw Error(fmt::format("{}: {}", arg, e.what()));
    }
  }
  if (kind == "external" && !arg.empty()) return std::make_shared<ExternalScorer>(arg);
  throw Error(fmt::format(
      "unknown scorer spec '{}' (expected ngram:<file>, uniform:<V>, mock-time or external:<cmd>)",
      spec));
}

}  // namespace latresc
