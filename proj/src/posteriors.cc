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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "latresc/lattice_ops.h"

namespace latresc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

Lattice ComputeArcPosteriors(const Lattice& lattice, const ScoreScales& scales) {
  if (lattice.nodes.empty() || lattice.start_node < 0 || lattice.end_node < 0) {
    throw Error(fmt::format("lattice {}: empty lattice", lattice.utterance_id));
  }
  if (!std::isfinite(scales.ac_scale) || !std::isfinite(scales.lm_scale)) {
    throw Error("posterior scales must be finite");
  }
  const auto order = TopologicalOrder(lattice);
  const size_t n = lattice.nodes.size();
  std::vector<double> alpha(n, kNegInf), beta(n, kNegInf);
  alpha[lattice.start_node] = 0.0;
  for (int v : order) {
    for (int a : lattice.nodes[v].entries) {
      const Arc& arc = lattice.arcs[a];
      alpha[v] = LogAdd(alpha[v], alpha[arc.source] + scales.Apply(arc));
    }
    if (v == lattice.start_node) alpha[v] = 0.0;
  }
  beta[lattice.end_node] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    for (int a : lattice.nodes[v].exits) {
      const Arc& arc = lattice.arcs[a];
      beta[v] = LogAdd(beta[v], scales.Apply(arc) + beta[arc.dest]);
    }
    if (v == lattice.end_node) beta[v] = 0.0;
  }
  const double total = alpha[lattice.end_node];
  if (!std::isfinite(total)) {
    throw Error(fmt::format(
        "lattice {}: total path probability underflows (log total {}); check score scales",
        lattice.utterance_id, total));
  }

  Lattice out = lattice;
  for (Arc& arc : out.arcs) {
    const double log_post = alpha[arc.source] + scales.Apply(arc) + beta[arc.dest] - total;
    arc.post = std::clamp(std::exp(log_post), 0.0, 1.0);
  }
  return out;
}

std::vector<int> ViterbiArcs(const Lattice& lattice, const ScoreScales& scales) {
  const auto order = TopologicalOrder(lattice);
  const size_t n = lattice.nodes.size();
  std::vector<double> best(n, kNegInf);
  std::vector<int> next_arc(n, -1);
  best[lattice.end_node] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (v == lattice.end_node) continue;
    for (int a : lattice.nodes[v].exits) {
      const Arc& arc = lattice.arcs[a];
      const double score = scales.Apply(arc) + best[arc.dest];
      if (score > best[v] || (score == best[v] && next_arc[v] >= 0 && a < next_arc[v])) {
        best[v] = score;
        next_arc[v] = a;
      }
    }
  }
  std::vector<int> path;
  for (int v = lattice.start_node; v != lattice.end_node && next_arc[v] >= 0;
       v = lattice.arcs[next_arc[v]].dest) {
    path.push_back(next_arc[v]);
  }
  return path;
}

Lattice Prune(const Lattice& lattice, const PruneOptions& options) {
  const bool had_posteriors =
      std::all_of(lattice.arcs.begin(), lattice.arcs.end(), [](const Arc& a) { return a.post; });
  const ScoreScales& scales = options.scales;

  // Beam: best complete path through each arc vs the global best.
  Lattice current = lattice;
  if (std::isfinite(options.beam)) {
    const auto order = TopologicalOrder(current);
    const size_t n = current.nodes.size();
    std::vector<double> fwd(n, kNegInf), bwd(n, kNegInf);
    fwd[current.start_node] = 0.0;
    for (int v : order) {
      for (int a : current.nodes[v].exits) {
        const Arc& arc = current.arcs[a];
        fwd[arc.dest] = std::max(fwd[arc.dest], fwd[v] + scales.Apply(arc));
      }
    }
    bwd[current.end_node] = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      for (int a : current.nodes[*it].exits) {
        const Arc& arc = current.arcs[a];
        bwd[*it] = std::max(bwd[*it], scales.Apply(arc) + bwd[arc.dest]);
      }
    }
    const double global_best = fwd[current.end_node];
    std::vector<bool> keep(current.arcs.size(), true);
    for (const Arc& arc : current.arcs) {
      const double through = fwd[arc.source] + scales.Apply(arc) + bwd[arc.dest];
      if (through < global_best - options.beam) keep[arc.id] = false;
    }
    for (int a : ViterbiArcs(current, scales)) keep[a] = true;
    current = KeepArcs(current, keep);
  }

  const LatticeStats stats = Stats(current);
  if (std::isfinite(options.max_density) && stats.duration_sec > 0.0) {
    const auto limit =
        static_cast<size_t>(std::floor(options.max_density * stats.duration_sec + 1e-9));
    if (current.arcs.size() > limit) {
      // Fresh posteriors: stored ones may predate the beam cut.
      const Lattice with_post = ComputeArcPosteriors(current, scales);
      std::vector<bool> is_best(with_post.arcs.size(), false);
      for (int a : ViterbiArcs(with_post, scales)) is_best[a] = true;

      // Removal order: ascending posterior, higher id first among equals.
      std::vector<int> candidates;
      for (const Arc& arc : with_post.arcs) {
        if (!is_best[arc.id]) candidates.push_back(arc.id);
      }
      std::sort(candidates.begin(), candidates.end(), [&](int x, int y) {
        const double px = *with_post.arcs[x].post, py = *with_post.arcs[y].post;
        if (px != py) return px < py;
        return x > y;
      });

      // Each removal can strand further arcs, so recount after every cut.
      std::vector<bool> keep(with_post.arcs.size(), true);
      Lattice pruned = with_post;
      for (int a : candidates) {
        if (pruned.arcs.size() <= limit) break;
        keep[a] = false;
        pruned = KeepArcs(with_post, keep);
      }
      current = std::move(pruned);
    }
  }

  if (current.arcs.size() == lattice.arcs.size()) return lattice;
  if (had_posteriors) return ComputeArcPosteriors(current, scales);
  for (Arc& arc : current.arcs) arc.post.reset();
  return current;
}

LatticeStats Stats(const Lattice& lattice) {
  LatticeStats stats;
  stats.num_nodes = static_cast<int>(lattice.nodes.size());
  stats.num_arcs = static_cast<int>(lattice.arcs.size());
  if (lattice.end_node >= 0) {
    stats.duration_sec =
        static_cast<double>(lattice.nodes[lattice.end_node].time) * lattice.frame_shift_ms / 1000.0;
  }
  if (stats.duration_sec > 0.0) stats.density = stats.num_arcs / stats.duration_sec;
  return stats;
}

}  // namespace latresc
