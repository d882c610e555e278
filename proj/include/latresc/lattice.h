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

// Word lattice data model.
//
// A lattice is a DAG with words and frame timestamps on nodes and scores on
// arcs. Every complete path from the "<s>" node to the "</s>" node is one
// hypothesis. All scores are natural-log and stored unscaled; scaling happens
// only when posteriors or combined scores are computed.

#ifndef LATRESC_LATTICE_H_
#define LATRESC_LATTICE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latresc/errors.h"

namespace latresc {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kEpsilon = "!NULL";

// True for "<s>", "</s>" and "!NULL": tokens that never enter a word history.
bool IsNonWord(std::string_view word);

struct Node {
  int id = 0;
  std::string word;
  int64_t time = 0;  // frame index
  std::vector<int> entries;
  std::vector<int> exits;

  bool operator==(const Node&) const = default;
};

struct Arc {
  int id = 0;
  int source = 0;
  int dest = 0;
  double ac_score = 0.0;  // acoustic log-likelihood
  double lm_score = 0.0;  // first-pass LM log-probability
  std::optional<double> post;
  std::map<std::string, double> model_scores;

  bool operator==(const Arc&) const = default;
};

struct Lattice {
  std::string utterance_id;
  double frame_shift_ms = 10.0;
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  int start_node = -1;
  int end_node = -1;

  int AddNode(std::string word, int64_t time);
  int AddArc(int source, int dest, double ac_score, double lm_score);

  // Sets start_node/end_node from the unique "<s>" and "</s>" nodes (-1 when
  // absent or ambiguous).
  void ResolveEndpoints();

  const Node& start() const { return nodes.at(start_node); }
  const Node& end() const { return nodes.at(end_node); }

  bool operator==(const Lattice&) const = default;
};

// Reports every violated lattice invariant; an empty result means valid.
std::vector<std::string> Validate(const Lattice& lattice);

// Throws ValidationError carrying all violations when the lattice is invalid.
void CheckValid(const Lattice& lattice);

// Node ids such that every arc points forward. Ties between simultaneously
// ready nodes are broken by ascending time, then ascending id. Throws on a
// cycle.
std::vector<int> TopologicalOrder(const Lattice& lattice);

// Copy of `lattice` holding only the arcs with keep_arc[id] set, minus any
// node (and its arcs) no longer on a complete start-to-end path. Surviving
// nodes and arcs keep their relative order and are renumbered densely.
Lattice KeepArcs(const Lattice& lattice, const std::vector<bool>& keep_arc);

}  // namespace latresc

#endif  // LATRESC_LATTICE_H_
