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

// Reference implementation of the external scorer protocol. Serves a
// built-in scorer (or a fixed value) over stdin/stdout, one JSON object per
// line. Used by the tests and handy as a template for real model servers.
//
//   latresc_scorer_stub --scorer ngram:model.txt
//   latresc_scorer_stub --fixed -2.0

#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latresc/errors.h"
#include "latresc/lattice.h"
#include "latresc/scorer_spec.h"

namespace {

using nlohmann::json;

json Handle(const json& request, const latresc::Scorer* scorer, std::optional<double> fixed) {
  const std::string op = request.at("op").get<std::string>();
  if (op == "hello") {
    json reply;
    reply["name"] = scorer ? scorer->Name() : "fixed";
    reply["time_sensitive"] = scorer ? scorer->TimeSensitive() : false;
    return reply;
  }
  json reply;
  if (fixed) {
    if (op != "score" && op != "sequence") throw latresc::Error("unknown op '" + op + "'");
    reply["logprob"] = *fixed;
    return reply;
  }
  const std::string utt = request.at("utt").get<std::string>();
  if (op == "score") {
    const auto history = request.at("history").get<std::vector<std::string>>();
    const std::string word = request.at("word").get<std::string>();
    const int64_t time = request.at("time").get<int64_t>();
    // Stateless: replay the history (its times are not sent, so replay uses
    // the query time; built-in scorers served here ignore it anyway).
    latresc::ScorerState state = scorer->BeginUtterance(utt, time);
    for (const auto& w : history) state = scorer->ScoreWord(state, w, time).state;
    reply["logprob"] = word == latresc::kSentenceEnd ? scorer->Finish(state)
                                                      : scorer->ScoreWord(state, word, time).logprob;
    return reply;
  }
  if (op == "sequence") {
    const auto words = request.at("words").get<std::vector<std::string>>();
    reply["logprob"] = scorer->ScoreSequence(utt, words);
    return reply;
  }
  throw latresc::Error("unknown op '" + op + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"External scorer protocol stub"};
  std::string spec;
  std::optional<double> fixed;
  app.add_option("--scorer", spec, "Built-in scorer spec to serve");
  app.add_option("--fixed", fixed, "Answer every score request with this value");
  CLI11_PARSE(app, argc, argv);
  if (spec.empty() == !fixed.has_value()) {
    std::cerr << "exactly one of --scorer and --fixed is required\n";
    return 2;
  }

  std::shared_ptr<const latresc::Scorer> scorer;
  try {
    if (!spec.empty()) scorer = latresc::MakeScorer(spec);
    if (scorer && scorer->TimeSensitive()) {
      std::cerr << "time-sensitive scorers need per-word times, which the protocol does not carry\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json reply;
    try {
      reply = Handle(json::parse(line), scorer.get(), fixed);
    } catch (const std::exception& e) {
      reply = json{{"error", e.what()}};
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
