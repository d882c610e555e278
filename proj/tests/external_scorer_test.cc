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

#include "latresc/external_scorer.h"

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "latresc/errors.h"
#include "latresc/lattice_io.h"
#include "latresc/lattice_ops.h"
#include "latresc/nbest.h"
#include "latresc/ngram_scorer.h"
#include "latresc/rescore.h"
#include "latresc/scorer_spec.h"
#include "test_util.h"

namespace latresc {
namespace {

using testing::EnumeratePaths;
using testing::PathStream;
using testing::RandomLattice;
using testing::RandomLatticeOptions;

const std::string kStub = LATRESC_STUB_PATH;

std::string ModelPath() {
  static const std::string path = [] {
    const auto dir = std::filesystem::temp_directory_path() / "latresc_external_test";
    std::filesystem::create_directories(dir);
    const std::string p = (dir / "model.ngram").string();
    NgramOptions opt;
    opt.order = 3;
    WriteFileAtomic(p, NgramScorer::Train("a b c\na c d\nb b a d\nc a b\nd d a b c\n", opt).Save());
    return p;
  }();
  return path;
}

TEST(ExternalScorer, Hello) {
  ExternalScorer ext(kStub + " --scorer ngram:" + ModelPath());
  EXPECT_EQ(ext.Name(), "ngram");
  EXPECT_FALSE(ext.TimeSensitive());
  ExternalScorer fixed(kStub + " --fixed -2.0");
  EXPECT_EQ(fixed.Name(), "fixed");
}

TEST(ExternalScorer, RawRoundTrip) {
  ExternalScorer fixed(kStub + " --fixed -2.0");
  EXPECT_EQ(fixed.Exchange(R"({"op":"hello"})"), R"({"name":"fixed","time_sensitive":false})");
  EXPECT_EQ(
      fixed.Exchange(R"({"op":"score","utt":"u1","history":["w1","w2"],"word":"w3","time":123})"),
      R"({"logprob":-2.0})");
  EXPECT_EQ(fixed.Exchange(R"({"op":"sequence","utt":"u1","words":["w1","w2"]})"),
            R"({"logprob":-2.0})");
  const auto state = fixed.BeginUtterance("u1", 100);
  EXPECT_EQ(fixed.ScoreWord(state, "w", 3).logprob, -2.0);
  EXPECT_EQ(fixed.Finish(state), -2.0);
}

TEST(ExternalScorer, RepliesMatchBuiltinBitExactly) {
  const auto builtin = MakeScorer("ngram:" + ModelPath());
  ExternalScorer ext(kStub + " --scorer ngram:" + ModelPath());
  const std::vector<std::string> words = {"a", "b", "zz", "c", "a", "d"};
  ScorerState sb = builtin->BeginUtterance("u", 50);
  ScorerState se = ext.BeginUtterance("u", 50);
  for (const auto& w : words) {
    const StepResult rb = builtin->ScoreWord(sb, w, 7);
    const StepResult re = ext.ScoreWord(se, w, 7);
    EXPECT_EQ(rb.logprob, re.logprob) << w;
    sb = rb.state;
    se = re.state;
  }
  EXPECT_EQ(builtin->Finish(sb), ext.Finish(se));
  EXPECT_EQ(builtin->ScoreSequence("u", words), ext.ScoreSequence("u", words));
  // Full-precision doubles survive the JSON text.
  const auto reply = nlohmann::json::parse(
      ext.Exchange(R"({"op":"sequence","utt":"u","words":["a","b","zz"]})"));
  EXPECT_EQ(reply.at("logprob").get<double>(),
            builtin->ScoreSequence("u", std::vector<std::string>{"a", "b", "zz"}));
}

TEST(ExternalScorer, LatticeRescoringMatchesBuiltin) {
  const auto builtin = MakeScorer("ngram:" + ModelPath());
  ExternalScorer ext(kStub + " --scorer ngram:" + ModelPath());
  std::mt19937_64 rng(11);
  RandomLatticeOptions opt;
  opt.epsilon_rate = 0.1;
  for (int i = 0; i < 20; ++i) {
    const Lattice lat = ComputeArcPosteriors(RandomLattice(rng, opt, "x" + std::to_string(i)));
    RescoreConfig cfg;
    cfg.ngram = 3;
    const Lattice a = RescoreLattice(lat, *builtin, cfg);
    const Lattice b = RescoreLattice(lat, ext, cfg);
    ASSERT_EQ(a.arcs.size(), b.arcs.size());
    for (size_t k = 0; k < a.arcs.size(); ++k) {
      EXPECT_NEAR(a.arcs[k].model_scores.at("lsync"), b.arcs[k].model_scores.at("lsync"), 1e-9);
    }
    for (const auto& path : EnumeratePaths(a)) {
      EXPECT_NEAR(PathStream(a, path, "lsync"), PathStream(b, path, "lsync"), 1e-9);
    }
  }
}

TEST(ExternalScorer, NBestRescoringMatchesBuiltin) {
  const auto builtin = MakeScorer("ngram:" + ModelPath());
  ExternalScorer ext(kStub + " --scorer ngram:" + ModelPath());
  std::mt19937_64 rng(12);
  const Lattice lat = RandomLattice(rng, {}, "nb");
  const NBestList list = ExtractNBest(lat, 10, {});
  const NBestList a = RescoreNBest(list, *builtin, "lm2");
  const NBestList b = RescoreNBest(list, ext, "lm2");
  for (size_t i = 0; i < a.hypotheses.size(); ++i) {
    EXPECT_NEAR(a.hypotheses[i].scores.at("lm2"), b.hypotheses[i].scores.at("lm2"), 1e-9);
  }
}

TEST(ExternalScorer, Failures) {
  EXPECT_THROW(ExternalScorer("exit 3"), ScorerError);
  EXPECT_THROW(ExternalScorer("echo not-json; cat"), ScorerError);
  // Answers hello, then garbage.
  ExternalScorer bad(R"(read l; echo '{"name":"x","time_sensitive":false}'; )"
                     R"(while read l; do echo '{"logprob":"nan"}'; done)");
  EXPECT_THROW(bad.ScoreWord(bad.BeginUtterance("u", 1), "a", 0), ScorerError);
  // Unknown ops come back as an error object, which is not a logprob.
  ExternalScorer stub(kStub + " --fixed -1");
  EXPECT_NE(stub.Exchange(R"({"op":"bogus"})").find("error"), std::string::npos);
  EXPECT_THROW(MakeScorer("nonsense"), Error);
  EXPECT_THROW(MakeScorer("ngram:/nonexistent/model"), Error);
}

}  // namespace
}  // namespace latresc
