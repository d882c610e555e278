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

// Drives the latresc binary end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "json.hpp"
#include "latresc/fixtures.h"
#include "latresc/lattice_io.h"
#include "latresc/lattice_ops.h"
#include "latresc/lattice_paths.h"
#include "latresc/nbest.h"
#include "latresc/text_util.h"
#include "latresc/wer.h"
#include "test_util.h"

namespace latresc {
namespace {

namespace fs = std::filesystem;

const std::string kCli = LATRESC_CLI_PATH;
const std::string kStub = LATRESC_STUB_PATH;
const std::string kDemo = std::string(LATRESC_SOURCE_DIR) + "/data/demo";

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr
};

RunResult RunCli(const std::string& args) {
  RunResult r;
  FILE* p = popen((kCli + " " + args + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.output.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "latresc_cli_test" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  std::string Write(const std::string& name, const Lattice& lat) const {
    fs::create_directories(fs::path(Path(name)).parent_path());
    WriteLatticeFile(Path(name), lat);
    return Path(name);
  }
  fs::path dir_;
};

Lattice Cyclic() {
  Lattice lat = testing::ChainLattice({"a", "b"}, {1, 2});
  lat.AddArc(2, 1, -1, -1);
  return lat;
}

TEST_F(CliTest, ValidateValidAndCyclic) {
  const auto ok = Write("ok.lat", testing::ChainLattice({"a", "b"}, {1, 2}));
  RunResult r = RunCli("validate " + ok);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.output, "");

  // The parser refuses cycles, so write the text by hand.
  WriteFileAtomic(Path("cyclic.lat"), SerializeLattice(Cyclic()));
  r = RunCli("validate " + Path("cyclic.lat"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("cycle"), std::string::npos) << r.output;
}

TEST_F(CliTest, ValidateDirectoryListsExactlyTheInvalidFiles) {
  std::mt19937_64 rng(4);
  fs::create_directories(Path("mixed"));
  std::set<std::string> invalid;
  for (int i = 0; i < 100; ++i) {
    const std::string name = Path(fmt::format("mixed/f{:03d}.lat", i));
    Lattice lat = testing::RandomLattice(rng, {}, fmt::format("u{}", i));
    std::string text = SerializeLattice(lat);
    switch (i % 5) {
      case 1:
        text = SerializeLattice(Cyclic());
        invalid.insert(name);
        break;
      case 3:
        text += "J=999 S=0\n";  // malformed arc line
        invalid.insert(name);
        break;
      case 4:
        if (i % 2 == 0) {  // time running backwards
          lat.nodes[lat.end_node].time = 0;
          text = SerializeLattice(lat);
          invalid.insert(name);
        }
        break;
      default:
        break;
    }
    WriteFileAtomic(name, text);
  }
  const RunResult r = RunCli("validate " + Path("mixed") + " --jobs 4");
  EXPECT_EQ(r.code, 1);
  std::set<std::string> reported;
  std::istringstream lines(r.output);
  for (std::string line; std::getline(lines, line);) {
    reported.insert(line.substr(0, line.find(".lat") + 4));
  }
  EXPECT_EQ(reported, invalid);
}

TEST_F(CliTest, PosteriorsOnChain) {
  const auto in = Write("chain.lat", testing::ChainLattice({"a", "b", "c"}, {1, 2, 3}));
  ASSERT_EQ(RunCli("posteriors " + in + " -o " + Path("out")).code, 0);
  const std::string text = ReadFile(Path("out/chain.lat"));
  const Lattice lat = ParseLattice(text);
  int with_post = 0;
  for (auto line : SplitLines(text)) {
    if (line.rfind("J=", 0) == 0) {
      EXPECT_NE(line.find("p=1.000000"), std::string_view::npos) << line;
      ++with_post;
    }
  }
  EXPECT_EQ(with_post, static_cast<int>(lat.arcs.size()));
}

TEST_F(CliTest, Stats606) {
  Lattice lat;
  lat.utterance_id = "dense";
  lat.AddNode("<s>", 0);
  for (int i = 0; i < 303; ++i) lat.AddNode("w" + std::to_string(i), 50);
  const int end = lat.AddNode("</s>", 100);
  for (int i = 1; i <= 303; ++i) {
    lat.AddArc(0, i, -1, -1);
    lat.AddArc(i, end, -1, -1);
  }
  lat.ResolveEndpoints();
  ASSERT_EQ(lat.arcs.size(), 606u);
  const RunResult r = RunCli("stats " + Write("dense.lat", lat));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("\t606.0\n"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("mean density\t606.0"), std::string::npos) << r.output;
}

double DensityFromStats(const std::string& output) {
  const auto pos = output.find("mean density\t");
  return std::stod(output.substr(pos + 13));
}

TEST_F(CliTest, PruneToDensityBound) {
  std::mt19937_64 rng(8);
  testing::RandomLatticeOptions opt;
  opt.num_inner = 30;
  opt.extra_arcs = 200;
  opt.max_time_step = 3;
  const Lattice lat = testing::RandomLattice(rng, opt, "dense");
  const auto in = Write("dense.lat", lat);
  const double before = DensityFromStats(RunCli("stats " + in).output);
  const double bound = before / 3;
  // The best path alone has to fit under the bound for it to be attainable.
  const auto best = ViterbiArcs(lat);
  ASSERT_LT(static_cast<double>(best.size()) / Stats(lat).duration_sec, bound);
  ASSERT_EQ(RunCli(fmt::format("prune {} --max-density {} -o {}", in, bound, Path("out"))).code, 0);
  const double after = DensityFromStats(RunCli("stats " + Path("out/dense.lat")).output);
  EXPECT_LE(after, bound + 0.05);  // stats prints one decimal
  EXPECT_LE(*Stats(ReadLatticeFile(Path("out/dense.lat"))).density, bound);
}

TEST_F(CliTest, RescoreUniformAndDeterminism) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 6; ++i) {
    Write(fmt::format("in/r{}.lat", i),
          ComputeArcPosteriors(testing::RandomLattice(rng, {}, fmt::format("r{}", i))));
  }
  ASSERT_EQ(RunCli("rescore-lattice " + Path("in") + " --scorer uniform:100 -o " + Path("a")).code, 0);
  for (const auto& entry : fs::directory_iterator(Path("a"))) {
    const Lattice out = ReadLatticeFile(entry.path().string());
    for (const Arc& arc : out.arcs) {
      EXPECT_NEAR(arc.model_scores.at("lsync"), -std::log(100.0), 1e-6);
    }
  }
  ASSERT_EQ(RunCli("rescore-lattice " + Path("in") + " --scorer mock-time -o " + Path("b")).code, 0);
  ASSERT_EQ(RunCli("--jobs 3 rescore-lattice " + Path("in") + " --scorer mock-time -o " + Path("c"))
                .code,
            0);
  ASSERT_EQ(RunCli("rescore-lattice " + Path("in") + " --scorer mock-time -o " + Path("d")).code, 0);
  for (int i = 0; i < 6; ++i) {
    const std::string name = fmt::format("/r{}.lat", i);
    EXPECT_EQ(ReadFile(Path("b") + name), ReadFile(Path("c") + name));
    EXPECT_EQ(ReadFile(Path("b") + name), ReadFile(Path("d") + name));
  }
}

TEST_F(CliTest, CollarChangesTimeSensitiveScores) {
  const auto in = Write("phrase.lat", ComputeArcPosteriors(RepeatedPhraseLattice()));
  ASSERT_EQ(RunCli("rescore-lattice " + in + " --scorer mock-time --collar 9 -o " + Path("c9")).code, 0);
  ASSERT_EQ(
      RunCli("rescore-lattice " + in + " --scorer mock-time --collar 1000 -o " + Path("c1000")).code,
      0);
  EXPECT_NE(ReadFile(Path("c9/phrase.lat")), ReadFile(Path("c1000/phrase.lat")));
  // Environment default for the collar.
  ASSERT_EQ(RunCli("rescore-lattice " + in + " --scorer mock-time -o " + Path("env") +
                " && LATRESC_COLLAR=1000 " + kCli + " rescore-lattice " + in +
                " --scorer mock-time -o " + Path("env1000"))
                .code,
            0);
  EXPECT_EQ(ReadFile(Path("env/phrase.lat")), ReadFile(Path("c9/phrase.lat")));
  EXPECT_EQ(ReadFile(Path("env1000/phrase.lat")), ReadFile(Path("c1000/phrase.lat")));
  // The shipped copy of the fixture is the same lattice.
  EXPECT_EQ(ReadLatticeFile(kDemo + "/repeated_phrase.lat"), RepeatedPhraseLattice());
}

TEST_F(CliTest, NBestAndSelect) {
  std::mt19937_64 rng(6);
  const Lattice lat = testing::RandomLattice(rng, {}, "nb");
  const auto in = Write("nb.lat", lat);
  ASSERT_EQ(RunCli("nbest " + in + " -n 1 -o " + Path("one.nbest")).code, 0);
  const auto one = ParseNBest(ReadFile(Path("one.nbest")));
  ASSERT_EQ(one.size(), 1u);
  ASSERT_EQ(one[0].hypotheses.size(), 1u);
  EXPECT_EQ(one[0].hypotheses[0].words, HypothesisFromArcs(lat, ViterbiArcs(lat)).words);

  // Exactly three paths.
  Lattice three;
  three.utterance_id = "three";
  three.AddNode("<s>", 0);
  for (const char* w : {"x", "y", "z"}) three.AddNode(w, 5);
  three.AddNode("</s>", 9);
  for (int i = 1; i <= 3; ++i) {
    three.AddArc(0, i, -i, -1);
    three.AddArc(i, 4, -1, -1);
  }
  three.ResolveEndpoints();
  ASSERT_EQ(RunCli("nbest " + Write("three.lat", three) + " -n 500 -o " + Path("three.nbest")).code, 0);
  EXPECT_EQ(ParseNBest(ReadFile(Path("three.nbest")))[0].hypotheses.size(), 3u);
}

TEST_F(CliTest, LatticeAndNBestRoutesAgree) {
  const std::string lm = kDemo + "/lm.ngram";
  std::string inputs;
  for (int i = 0; i < 5; ++i) inputs += fmt::format(" {}/lattices/demo{:03d}.lat", kDemo, i);
  ASSERT_EQ(RunCli("posteriors" + inputs + " -o " + Path("post")).code, 0);
  ASSERT_EQ(RunCli("rescore-lattice " + Path("post") + " --scorer ngram:" + lm + " --ngram 3 -o " +
                Path("resc"))
                .code,
            0);
  const std::string coeffs = "gamma=0.8,lsync=1.2,kappa=0.5";
  ASSERT_EQ(RunCli("select " + Path("resc") + " --coeffs " + coeffs + " -o " + Path("lat.txt")).code,
            0);
  ASSERT_EQ(RunCli("nbest" + inputs + " -n 100000 -o " + Path("all.nbest")).code, 0);
  ASSERT_EQ(RunCli("rescore-nbest " + Path("all.nbest") + " --scorer ngram:" + lm + " -o " +
                Path("all_resc.nbest"))
                .code,
            0);
  ASSERT_EQ(
      RunCli("select " + Path("all_resc.nbest") + " --coeffs " + coeffs + " -o " + Path("nb.txt")).code,
      0);
  EXPECT_EQ(ReadFile(Path("lat.txt")), ReadFile(Path("nb.txt")));
  EXPECT_EQ(ParseTranscripts(ReadFile(Path("lat.txt"))).size(), 5u);
}

TEST_F(CliTest, TuneSingletonsWarnsAndReturnsInit) {
  TuningCorpus corpus = SyntheticTuningCorpus(3, 8);
  std::string nbest;
  for (auto& list : corpus.candidates) {
    list.hypotheses.resize(1);
    nbest += SerializeNBest(list);
  }
  WriteFileAtomic(Path("single.nbest"), nbest);
  WriteFileAtomic(Path("refs.txt"), SerializeTranscripts(corpus.refs));
  const RunResult r = RunCli("tune " + Path("single.nbest") + " --refs " + Path("refs.txt") +
                          " --init gamma=1,rnnlm=0,lsync_rnn=0,oracle=0 -o " + Path("r.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("warning"), std::string::npos) << r.output;
  const auto j = nlohmann::json::parse(ReadFile(Path("r.json")));
  EXPECT_EQ(j.at("coefficients"), j.at("initial_coefficients"));
}

TEST_F(CliTest, TuneReducesWerOnOracleCorpus) {
  const RunResult r = RunCli("tune " + kDemo + "/tune.nbest --refs " + kDemo +
                          "/tune_refs.txt --budget 600 --seed 2 -o " + Path("r.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = nlohmann::json::parse(ReadFile(Path("r.json")));
  EXPECT_LT(j.at("dev_wer").get<double>(), j.at("initial_wer").get<double>());
  EXPECT_EQ(j.at("parameters").size(), 5u);
  // Same seed, same report.
  ASSERT_EQ(RunCli("tune " + kDemo + "/tune.nbest --refs " + kDemo +
                "/tune_refs.txt --budget 600 --seed 2 -o " + Path("r2.json"))
                .code,
            0);
  EXPECT_EQ(ReadFile(Path("r.json")), ReadFile(Path("r2.json")));
}

TEST_F(CliTest, Score) {
  const std::string refs = kDemo + "/refs.txt";
  RunResult r = RunCli("score --ref " + refs + " --hyp " + refs);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.output.rfind("WER 0.0% ", 0), 0u) << r.output;

  r = RunCli("score --ref " + refs + " --hyp " + refs + " --baseline " + refs +
          " --buckets 5,10,15,20,30");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("[30,inf)"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("[5,10)"), std::string::npos);

  r = RunCli("score --ref " + refs + " --hyp " + kDemo + "/tune_refs.txt");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("mismatch"), std::string::npos);

  EXPECT_EQ(RunCli("score --ref " + refs + " --hyp " + refs + " --buckets 5,10").code, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("").code, 2);
  EXPECT_EQ(RunCli("no-such-command").code, 2);
  EXPECT_EQ(RunCli("rescore-lattice x -o y").code, 2);  // --scorer missing
  EXPECT_EQ(RunCli("--help").code, 0);
  EXPECT_EQ(RunCli("validate " + Path("missing.lat")).code, 1);

  const auto chain = Write("chain.lat", testing::ChainLattice({"a"}, {1}));
  // No posteriors yet.
  RunResult r = RunCli("rescore-lattice " + chain + " --scorer uniform:10 -o " + Path("o"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("posterior"), std::string::npos) << r.output;

  const auto post = Write("post.lat", ComputeArcPosteriors(testing::ChainLattice({"a"}, {1})));
  r = RunCli("rescore-lattice " + post + " --scorer 'external:exit 1' -o " + Path("o"));
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_EQ(RunCli("rescore-lattice " + post + " --scorer bogus -o " + Path("o")).code, 1);
  EXPECT_EQ(RunCli("rescore-lattice " + post + " --scorer uniform:10 --collar -3 -o " + Path("o")).code,
            2);
}

TEST_F(CliTest, ExternalScorerThroughCli) {
  const std::string lm = kDemo + "/lm.ngram";
  const std::string in = kDemo + "/lattices/demo001.lat";
  ASSERT_EQ(RunCli("posteriors " + in + " -o " + Path("post")).code, 0);
  ASSERT_EQ(RunCli("rescore-lattice " + Path("post") + " --scorer ngram:" + lm + " -o " + Path("a"))
                .code,
            0);
  ASSERT_EQ(RunCli("rescore-lattice " + Path("post") + " --scorer 'external:" + kStub +
                " --scorer ngram:" + lm + "' -o " + Path("b"))
                .code,
            0);
  const Lattice a = ReadLatticeFile(Path("a/demo001.lat"));
  const Lattice b = ReadLatticeFile(Path("b/demo001.lat"));
  ASSERT_EQ(a.arcs.size(), b.arcs.size());
  for (size_t i = 0; i < a.arcs.size(); ++i) {
    EXPECT_NEAR(a.arcs[i].model_scores.at("lsync"), b.arcs[i].model_scores.at("lsync"), 1e-9);
  }
}

TEST_F(CliTest, GenFixturesIsSeeded) {
  ASSERT_EQ(RunCli("gen-fixtures --seed 1 -o " + Path("a")).code, 0);
  ASSERT_EQ(RunCli("gen-fixtures --seed 1 -o " + Path("b")).code, 0);
  ASSERT_EQ(RunCli("gen-fixtures --seed 2 -o " + Path("c")).code, 0);
  EXPECT_EQ(ReadFile(Path("a/refs.txt")), ReadFile(Path("b/refs.txt")));
  EXPECT_EQ(ReadFile(Path("a/tune.nbest")), ReadFile(Path("b/tune.nbest")));
  EXPECT_EQ(ReadFile(Path("a/lattices/demo007.lat")), ReadFile(Path("b/lattices/demo007.lat")));
  EXPECT_NE(ReadFile(Path("a/refs.txt")), ReadFile(Path("c/refs.txt")));
  // The shipped demo corpus is the seed-1 output.
  EXPECT_EQ(ReadFile(Path("a/refs.txt")), ReadFile(kDemo + "/refs.txt"));
  EXPECT_EQ(ReadFile(Path("a/lm.ngram")), ReadFile(kDemo + "/lm.ngram"));
  EXPECT_EQ(RunCli("validate --manifest " + Path("a/manifest.txt")).code, 0);
}

}  // namespace
}  // namespace latresc
