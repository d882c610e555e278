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

#include "latresc/lattice.h"

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "latresc/errors.h"
#include "latresc/lattice_io.h"
#include "test_util.h"

namespace latresc {
namespace {

using ::latresc::testing::RandomLattice;
using ::latresc::testing::RandomLatticeOptions;

constexpr char kDiamond[] = R"(# a diamond
UTT=diamond FRAMESHIFT=10 N=4 L=4
I=0 t=0 W=<s>
I=1 t=10 W=hello
I=2 t=10 W=yellow
I=3 t=20 W=</s>
J=0 S=0 E=1 a=-10.5 l=-2.25
J=1 S=0 E=2 a=-11 l=-3
J=2 S=1 E=3 a=-1 l=-0.5 m:rnnlm=-1.25
J=3 S=2 E=3 a=-1 l=-0.5 p=0.25
)";

bool Mentions(const std::vector<std::string>& violations, const std::string& needle) {
  for (const auto& v : violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(LatticeParse, ReadsFieldsAndEndpoints) {
  const Lattice lat = ParseLattice(kDiamond);
  EXPECT_EQ(lat.utterance_id, "diamond");
  ASSERT_EQ(lat.nodes.size(), 4u);
  ASSERT_EQ(lat.arcs.size(), 4u);
  EXPECT_EQ(lat.start_node, 0);
  EXPECT_EQ(lat.end_node, 3);
  EXPECT_EQ(lat.nodes[2].word, "yellow");
  EXPECT_EQ(lat.nodes[2].time, 10);
  EXPECT_DOUBLE_EQ(lat.arcs[0].ac_score, -10.5);
  EXPECT_DOUBLE_EQ(lat.arcs[0].lm_score, -2.25);
  EXPECT_FALSE(lat.arcs[0].post.has_value());
  EXPECT_DOUBLE_EQ(*lat.arcs[3].post, 0.25);
  EXPECT_DOUBLE_EQ(lat.arcs[2].model_scores.at("rnnlm"), -1.25);
  EXPECT_EQ(lat.nodes[0].exits, (std::vector<int>{0, 1}));
  EXPECT_EQ(lat.nodes[3].entries, (std::vector<int>{2, 3}));
}

TEST(LatticeParse, RoundTripIsCanonical) {
  const Lattice lat = ParseLattice(kDiamond);
  const std::string text = SerializeLattice(lat);
  const Lattice again = ParseLattice(text);
  EXPECT_EQ(lat, again);
  EXPECT_EQ(text, SerializeLattice(again));
}

TEST(LatticeParse, RandomRoundTrip) {
  std::mt19937_64 rng(7);
  RandomLatticeOptions opt;
  opt.epsilon_rate = 0.2;
  for (int i = 0; i < 50; ++i) {
    opt.num_inner = 1 + i % 9;
    const Lattice lat = RandomLattice(rng, opt);
    EXPECT_EQ(ParseLattice(SerializeLattice(lat)), lat);
  }
}

TEST(LatticeParse, FormatErrorsCarryLineNumbers) {
  const std::string bad = "UTT=x N=2 L=1\nI=0 t=0 W=<s>\nI=1 t=zz W=</s>\nJ=0 S=0 E=1 a=0 l=0\n";
  try {
    ParseLattice(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(ParseLattice("I=0 t=0 W=<s>\n"), FormatError);
  EXPECT_THROW(ParseLattice("UTT=x N=1 L=0\nI=0 t=0 W=<s>\nI=1 t=0 W=</s>\n"), FormatError);
  EXPECT_THROW(ParseLattice("UTT=x N=2 L=1\nI=0 t=0 W=<s>\nI=1 t=1 W=</s>\nJ=0 S=0 E=1 a=0 l=0 q=1\n"),
               FormatError);
}

TEST(LatticeValidate, ValidLatticeHasNoViolations) {
  EXPECT_TRUE(Validate(ParseLattice(kDiamond)).empty());
}

TEST(LatticeValidate, ReportsCycle) {
  Lattice lat;
  lat.AddNode("<s>", 0);
  lat.AddNode("a", 1);
  lat.AddNode("b", 1);
  lat.AddNode("</s>", 2);
  lat.AddArc(0, 1, 0, 0);
  lat.AddArc(1, 2, 0, 0);
  lat.AddArc(2, 1, 0, 0);
  lat.AddArc(2, 3, 0, 0);
  lat.ResolveEndpoints();
  const auto v = Validate(lat);
  EXPECT_TRUE(Mentions(v, "cycle involving nodes 1,2")) << ::testing::PrintToString(v);
  EXPECT_THROW(TopologicalOrder(lat), Error);
  EXPECT_THROW(CheckValid(lat), ValidationError);
}

TEST(LatticeValidate, ReportsUnreachableAndDeadEnds) {
  Lattice lat;
  lat.AddNode("<s>", 0);
  lat.AddNode("a", 1);
  lat.AddNode("orphan", 1);
  lat.AddNode("dead", 1);
  lat.AddNode("</s>", 2);
  lat.AddArc(0, 1, 0, 0);
  lat.AddArc(1, 4, 0, 0);
  lat.AddArc(2, 4, 0, 0);
  lat.AddArc(0, 3, 0, 0);
  lat.ResolveEndpoints();
  const auto v = Validate(lat);
  EXPECT_TRUE(Mentions(v, "node 2 not on any complete path"));
  EXPECT_TRUE(Mentions(v, "node 3 not on any complete path"));
  EXPECT_FALSE(Mentions(v, "node 1 "));
}

TEST(LatticeValidate, ReportsTimeAndEndpointProblems) {
  Lattice lat;
  lat.AddNode("<s>", 0);
  lat.AddNode("a", 5);
  lat.AddNode("b", 3);
  lat.AddNode("</s>", 6);
  lat.AddArc(0, 1, 0, 0);
  lat.AddArc(1, 2, 0, 0);
  lat.AddArc(2, 3, 0, 0);
  lat.ResolveEndpoints();
  EXPECT_TRUE(Mentions(Validate(lat), "arc 1: non-monotonic time"));

  lat.nodes[2].word = "<s>";
  lat.nodes[2].time = 5;
  lat.ResolveEndpoints();
  EXPECT_TRUE(Mentions(Validate(lat), "multiple start nodes: 0,2"));

  Lattice bad_post = ParseLattice(kDiamond);
  bad_post.arcs[0].post = 1.5;
  EXPECT_TRUE(Mentions(Validate(bad_post), "posterior"));
}

TEST(LatticeValidate, RandomLatticesAreValid) {
  std::mt19937_64 rng(11);
  RandomLatticeOptions opt;
  opt.epsilon_rate = 0.15;
  for (int i = 0; i < 100; ++i) {
    opt.num_inner = 1 + i % 10;
    const Lattice lat = RandomLattice(rng, opt);
    EXPECT_TRUE(Validate(lat).empty()) << SerializeLattice(lat);
  }
}

TEST(TopologicalOrder, RespectsArcsAndTimes) {
  std::mt19937_64 rng(3);
  RandomLatticeOptions opt;
  opt.num_inner = 9;
  for (int i = 0; i < 50; ++i) {
    const Lattice lat = RandomLattice(rng, opt);
    const auto order = TopologicalOrder(lat);
    ASSERT_EQ(order.size(), lat.nodes.size());
    std::vector<int> pos(order.size());
    for (size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
    for (const Arc& arc : lat.arcs) EXPECT_LT(pos[arc.source], pos[arc.dest]);
    EXPECT_EQ(order.front(), lat.start_node);
    EXPECT_EQ(order.back(), lat.end_node);
  }
}

TEST(KeepArcs, DropsNodesOffCompletePaths) {
  const Lattice lat = ParseLattice(kDiamond);
  const Lattice upper = KeepArcs(lat, {true, false, true, false});
  ASSERT_EQ(upper.nodes.size(), 3u);
  ASSERT_EQ(upper.arcs.size(), 2u);
  EXPECT_EQ(upper.nodes[1].word, "hello");
  EXPECT_TRUE(Validate(upper).empty());
}

TEST(LatticeFiles, AtomicWriteAndPathContext) {
  const auto dir = std::filesystem::temp_directory_path() / "latresc_lattice_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "d.lat").string();
  const Lattice lat = ParseLattice(kDiamond);
  WriteLatticeFile(path, lat);
  EXPECT_EQ(ReadLatticeFile(path), lat);

  const std::string broken = (dir / "broken.lat").string();
  WriteFileAtomic(broken, "UTT=x N=1 L=0\nI=0 t=q W=<s>\n");
  try {
    ReadLatticeFile(broken);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(broken), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos);
  }
  EXPECT_THROW(ReadLatticeFile((dir / "missing.lat").string()), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace latresc
