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

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <tuple>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace latresc {

FormatError::FormatError(int line, const std::string& what)
    : Error(fmt::format("line {}: {}", line, what)), line_(line) {}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(violations.empty()
                ? std::string("invalid lattice")
                : fmt::format("invalid lattice: {}", fmt::join(violations, "; "))),
      violations_(std::move(violations)) {}

bool IsNonWord(std::string_view word) {
  return word == kSentenceStart || word == kSentenceEnd || word == kEpsilon;
}

int Lattice::AddNode(std::string word, int64_t time) {
  Node node;
  node.id = static_cast<int>(nodes.size());
  node.word = std::move(word);
  node.time = time;
  nodes.push_back(std::move(node));
  return nodes.back().id;
}

int Lattice::AddArc(int source, int dest, double ac_score, double lm_score) {
  Arc arc;
  arc.id = static_cast<int>(arcs.size());
  arc.source = source;
  arc.dest = dest;
  arc.ac_score = ac_score;
  arc.lm_score = lm_score;
  nodes.at(source).exits.push_back(arc.id);
  nodes.at(dest).entries.push_back(arc.id);
  arcs.push_back(std::move(arc));
  return arcs.back().id;
}

void Lattice::ResolveEndpoints() {
  start_node = -1;
  end_node = -1;
  int num_starts = 0;
  int num_ends = 0;
  for (const Node& node : nodes) {
    if (node.word == kSentenceStart) {
      ++num_starts;
      start_node = node.id;
    } else if (node.word == kSentenceEnd) {
      ++num_ends;
      end_node = node.id;
    }
  }
  if (num_starts != 1) start_node = -1;
  if (num_ends != 1) end_node = -1;
}

namespace {

bool ArcEndpointsValid(const Lattice& lattice, const Arc& arc) {
  const int n = static_cast<int>(lattice.nodes.size());
  return arc.source >= 0 && arc.source < n && arc.dest >= 0 && arc.dest < n;
}

// Strongly connected components with more than one node, or with a self loop.
// Kosaraju with explicit stacks.
std::vector<std::vector<int>> CyclicComponents(const Lattice& lattice) {
  const int n = static_cast<int>(lattice.nodes.size());
  std::vector<std::vector<int>> succ(n), pred(n);
  std::vector<bool> self_loop(n, false);
  for (const Arc& arc : lattice.arcs) {
    if (!ArcEndpointsValid(lattice, arc)) continue;
    succ[arc.source].push_back(arc.dest);
    pred[arc.dest].push_back(arc.source);
    if (arc.source == arc.dest) self_loop[arc.source] = true;
  }

  std::vector<int> finish_order;
  std::vector<bool> seen(n, false);
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<int, size_t>> stack = {{root, 0}};
    seen[root] = true;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < succ[v].size()) {
        const int w = succ[v][next++];
        if (!seen[w]) {
          seen[w] = true;
          stack.emplace_back(w, 0);
        }
      } else {
        finish_order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<int> component(n, -1);
  std::vector<std::vector<int>> cyclic;
  for (auto it = finish_order.rbegin(); it != finish_order.rend(); ++it) {
    if (component[*it] >= 0) continue;
    std::vector<int> members;
    std::vector<int> stack = {*it};
    component[*it] = *it;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (int w : pred[v]) {
        if (component[w] < 0) {
          component[w] = *it;
          stack.push_back(w);
        }
      }
    }
    if (members.size() > 1 || self_loop[members.front()]) {
      std::sort(members.begin(), members.end());
      cyclic.push_back(std::move(members));
    }
  }
  std::sort(cyclic.begin(), cyclic.end());
  return cyclic;
}

std::vector<bool> Reachable(const Lattice& lattice, int from, bool forward) {
  std::vector<bool> seen(lattice.nodes.size(), false);
  if (from < 0) return seen;
  std::vector<int> stack = {from};
  seen[from] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    const auto& arc_ids = forward ? lattice.nodes[v].exits : lattice.nodes[v].entries;
    for (int a : arc_ids) {
      if (a < 0 || a >= static_cast<int>(lattice.arcs.size())) continue;
      const Arc& arc = lattice.arcs[a];
      if (!ArcEndpointsValid(lattice, arc)) continue;
      const int w = forward ? arc.dest : arc.source;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<std::string> Validate(const Lattice& lattice) {
  std::vector<std::string> out;
  const int num_nodes = static_cast<int>(lattice.nodes.size());
  const int num_arcs = static_cast<int>(lattice.arcs.size());

  if (num_nodes == 0) {
    out.push_back("lattice has no nodes");
    return out;
  }
  if (!(lattice.frame_shift_ms > 0) || !std::isfinite(lattice.frame_shift_ms)) {
    out.push_back(fmt::format("frame shift {} is not positive", lattice.frame_shift_ms));
  }

  std::vector<int> starts, ends;
  for (int i = 0; i < num_nodes; ++i) {
    const Node& node = lattice.nodes[i];
    if (node.id != i) out.push_back(fmt::format("node at index {} has id {}", i, node.id));
    if (node.time < 0) out.push_back(fmt::format("node {} has negative time {}", i, node.time));
    if (node.word.empty()) out.push_back(fmt::format("node {} has an empty word", i));
    if (node.word == kSentenceStart) starts.push_back(i);
    if (node.word == kSentenceEnd) ends.push_back(i);
  }
  if (starts.empty()) out.push_back("no start node (word <s>)");
  if (starts.size() > 1) out.push_back(fmt::format("multiple start nodes: {}", fmt::join(starts, ",")));
  if (ends.empty()) out.push_back("no end node (word </s>)");
  if (ends.size() > 1) out.push_back(fmt::format("multiple end nodes: {}", fmt::join(ends, ",")));
  const int start = starts.size() == 1 ? starts[0] : -1;
  const int end = ends.size() == 1 ? ends[0] : -1;
  if (start >= 0) {
    if (lattice.nodes[start].time != 0) {
      out.push_back(fmt::format("start node {} has time {}, expected 0", start,
                                lattice.nodes[start].time));
    }
    if (!lattice.nodes[start].entries.empty()) {
      out.push_back(fmt::format("start node {} has incoming arcs", start));
    }
  }
  if (end >= 0 && !lattice.nodes[end].exits.empty()) {
    out.push_back(fmt::format("end node {} has outgoing arcs", end));
  }
  if (lattice.start_node != start || lattice.end_node != end) {
    if (start >= 0 && end >= 0) {
      out.push_back(fmt::format("endpoints recorded as {}->{} but words give {}->{}",
                                lattice.start_node, lattice.end_node, start, end));
    }
  }

  bool arcs_consistent = true;
  for (int i = 0; i < num_arcs; ++i) {
    const Arc& arc = lattice.arcs[i];
    if (arc.id != i) out.push_back(fmt::format("arc at index {} has id {}", i, arc.id));
    if (!ArcEndpointsValid(lattice, arc)) {
      out.push_back(fmt::format("arc {} references a missing node ({} -> {})", i, arc.source,
                                arc.dest));
      arcs_consistent = false;
      continue;
    }
    const Node& src = lattice.nodes[arc.source];
    const Node& dst = lattice.nodes[arc.dest];
    if (dst.time < src.time) {
      out.push_back(fmt::format("arc {}: non-monotonic time (node {} t={} -> node {} t={})", i,
                                src.id, src.time, dst.id, dst.time));
    }
    if (!std::isfinite(arc.ac_score) || !std::isfinite(arc.lm_score)) {
      out.push_back(fmt::format("arc {} has a non-finite score", i));
    }
    if (arc.post && !(*arc.post >= 0.0 && *arc.post <= 1.0)) {
      out.push_back(fmt::format("arc {} posterior {} outside [0,1]", i, *arc.post));
    }
    for (const auto& [stream, score] : arc.model_scores) {
      if (!std::isfinite(score)) {
        out.push_back(fmt::format("arc {} stream {} score is not finite", i, stream));
      }
    }
    if (std::count(src.exits.begin(), src.exits.end(), i) != 1 ||
        std::count(dst.entries.begin(), dst.entries.end(), i) != 1) {
      out.push_back(fmt::format("arc {} is not linked exactly once from its endpoints", i));
      arcs_consistent = false;
    }
  }
  for (const Node& node : lattice.nodes) {
    for (int a : node.exits) {
      if (a < 0 || a >= num_arcs || lattice.arcs[a].source != node.id) {
        out.push_back(fmt::format("node {} lists exit arc {} that does not leave it", node.id, a));
        arcs_consistent = false;
      }
    }
    for (int a : node.entries) {
      if (a < 0 || a >= num_arcs || lattice.arcs[a].dest != node.id) {
        out.push_back(fmt::format("node {} lists entry arc {} that does not enter it", node.id, a));
        arcs_consistent = false;
      }
    }
  }
  if (!arcs_consistent) return out;

  for (const auto& members : CyclicComponents(lattice)) {
    out.push_back(fmt::format("cycle involving nodes {}", fmt::join(members, ",")));
  }

  if (start >= 0 && end >= 0) {
    const auto from_start = Reachable(lattice, start, /*forward=*/true);
    const auto to_end = Reachable(lattice, end, /*forward=*/false);
    for (int i = 0; i < num_nodes; ++i) {
      if (!from_start[i] || !to_end[i]) {
        out.push_back(fmt::format("node {} not on any complete path", i));
      }
    }
  }
  return out;
}

void CheckValid(const Lattice& lattice) {
  auto violations = Validate(lattice);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

std::vector<int> TopologicalOrder(const Lattice& lattice) {
  const int n = static_cast<int>(lattice.nodes.size());
  std::vector<int> pending(n, 0);
  for (const Arc& arc : lattice.arcs) ++pending[arc.dest];

  using Key = std::tuple<int64_t, int>;  // (time, id)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (int i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.emplace(lattice.nodes[i].time, i);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = std::get<1>(ready.top());
    ready.pop();
    order.push_back(v);
    for (int a : lattice.nodes[v].exits) {
      const int w = lattice.arcs[a].dest;
      if (--pending[w] == 0) ready.emplace(lattice.nodes[w].time, w);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw Error(fmt::format("lattice {}: cycle detected", lattice.utterance_id));
  }
  return order;
}

Lattice KeepArcs(const Lattice& lattice, const std::vector<bool>& keep_arc) {
  const int n = static_cast<int>(lattice.nodes.size());
  std::vector<bool> keep = keep_arc;
  keep.resize(lattice.arcs.size(), false);

  // Forward and backward reachability over kept arcs only.
  auto reach = [&](int from, bool forward) {
    std::vector<bool> seen(n, false);
    if (from < 0) return seen;
    std::vector<int> stack = {from};
    seen[from] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int a : forward ? lattice.nodes[v].exits : lattice.nodes[v].entries) {
        if (!keep[a]) continue;
        const int w = forward ? lattice.arcs[a].dest : lattice.arcs[a].source;
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return seen;
  };
  const auto from_start = reach(lattice.start_node, true);
  const auto to_end = reach(lattice.end_node, false);

  Lattice out;
  out.utterance_id = lattice.utterance_id;
  out.frame_shift_ms = lattice.frame_shift_ms;
  std::vector<int> node_map(n, -1);
  for (int i = 0; i < n; ++i) {
    if (from_start[i] && to_end[i]) {
      node_map[i] = out.AddNode(lattice.nodes[i].word, lattice.nodes[i].time);
    }
  }
  for (const Arc& arc : lattice.arcs) {
    if (!keep[arc.id] || node_map[arc.source] < 0 || node_map[arc.dest] < 0) continue;
    const int id = out.AddArc(node_map[arc.source], node_map[arc.dest], arc.ac_score, arc.lm_score);
    out.arcs[id].post = arc.post;
    out.arcs[id].model_scores = arc.model_scores;
  }
  out.start_node = lattice.start_node >= 0 ? node_map[lattice.start_node] : -1;
  out.end_node = lattice.end_node >= 0 ? node_map[lattice.end_node] : -1;
  return out;
}

}  // namespace latresc
