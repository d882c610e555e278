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

#include "latresc/rescore.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>

#include <fmt/format.h>

#include "latresc/lattice_paths.h"

namespace latresc {

size_t WordHistoryHash::operator()(const WordHistory& h) const {
  size_t seed = h.size();
  for (int w : h) {
    seed ^= std::hash<int>()(w) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }
  return seed;
}

double RescoreCache::Entry::PostSum() const {
  return std::accumulate(post.begin(), post.end(), 0.0);
}

RescoreCache::RescoreCache(int64_t collar) : collar_(collar) {
  if (collar < 0) throw Error("collar must be non-negative");
}

RescoreCache::Entry* RescoreCache::Lookup(const WordHistory& hist, int64_t time) {
  auto it = entries_.find(hist);
  if (it == entries_.end()) return nullptr;
  auto& by_time = it->second;
  auto after = by_time.lower_bound(time);
  Entry* best = nullptr;
  int64_t best_dist = 0;
  if (after != by_time.begin()) {
    auto before = std::prev(after);
    best = &before->second;
    best_dist = time - before->first;
  }
  if (after != by_time.end()) {
    const int64_t dist = after->first - time;
    if (!best || dist < best_dist) {
      best = &after->second;
      best_dist = dist;
    }
  }
  if (best && best_dist <= collar_) return best;
  return nullptr;
}

RescoreCache::Entry& RescoreCache::Insert(const WordHistory& hist, int64_t time,
                                          ScorerState state, std::vector<double> post) {
  auto& by_time = entries_[hist];
  auto [it, inserted] = by_time.try_emplace(time);
  if (!inserted) throw Error("rescore cache: duplicate (history, time) entry");
  ++size_;
  Entry& entry = it->second;
  entry.time = time;
  entry.state = std::move(state);
  entry.post = std::move(post);
  return entry;
}

size_t RescoreCache::CountFor(const WordHistory& hist) const {
  auto it = entries_.find(hist);
  return it == entries_.end() ? 0 : it->second.size();
}

namespace {

enum class NodeKind { kStart, kEnd, kEpsilon, kWord };

// Keeps the last `n` items.
template <typename T>
void KeepLast(std::vector<T>& v, size_t n) {
  if (v.size() > n) v.erase(v.begin(), v.end() - static_cast<long>(n));
}

class Expander {
 public:
  struct XNode {
    int orig;
    WordHistory hist;
  };
  struct XArc {
    int orig_arc;
    int src;
    int dst;
    double model_score = 0.0;
  };

  Expander(const Lattice& lattice, int n) : lattice_(lattice), keep_(static_cast<size_t>(n - 1)) {
    if (n < 2) throw Error(fmt::format("n-gram clustering order must be >= 2, got {}", n));
    kinds_.resize(lattice.nodes.size());
    word_ids_.resize(lattice.nodes.size(), -1);
    for (const Node& node : lattice.nodes) {
      if (node.id == lattice.start_node) {
        kinds_[node.id] = NodeKind::kStart;
      } else if (node.id == lattice.end_node) {
        kinds_[node.id] = NodeKind::kEnd;
      } else if (node.word == kEpsilon || IsNonWord(node.word)) {
        kinds_[node.id] = NodeKind::kEpsilon;
      } else {
        kinds_[node.id] = NodeKind::kWord;
        auto [it, inserted] = ids_.try_emplace(node.word, static_cast<int>(ids_.size()));
        word_ids_[node.id] = it->second;
      }
    }
  }

  NodeKind kind(int node) const { return kinds_[node]; }
  int word_id(int node) const { return word_ids_[node]; }
  const XNode& xnode(int x) const { return xnodes_[x]; }

  // visit(src_x, dst_x, arc) -> model score for the new arc.
  template <typename Visit>
  void Run(Visit&& visit) {
    order_ = TopologicalOrder(lattice_);
    copies_.assign(lattice_.nodes.size(), {});
    by_hist_.assign(lattice_.nodes.size(), {});
    NewCopy(lattice_.start_node, {});
    for (int v : order_) {
      // Copies of v all exist by now: every predecessor has been processed.
      const std::vector<int> copies = copies_[v];
      for (int xj : copies) {
        for (int a : lattice_.nodes[v].exits) {
          const Arc& arc = lattice_.arcs[a];
          const int k = arc.dest;
          WordHistory hist;
          switch (kinds_[k]) {
            case NodeKind::kWord:
              hist = xnodes_[xj].hist;
              hist.push_back(word_ids_[k]);
              KeepLast(hist, keep_);
              break;
            case NodeKind::kEpsilon:
              hist = xnodes_[xj].hist;
              break;
            case NodeKind::kEnd:
            case NodeKind::kStart:
              break;
          }
          auto found = by_hist_[k].find(hist);
          const int xl = found != by_hist_[k].end() ? found->second : NewCopy(k, std::move(hist));
          xarcs_.push_back(XArc{a, xj, xl, 0.0});
          const size_t idx = xarcs_.size() - 1;
          xarcs_[idx].model_score = visit(xj, xl, arc);
        }
      }
    }
  }

  Lattice Build(const std::string* stream) const {
    Lattice out;
    out.utterance_id = lattice_.utterance_id;
    out.frame_shift_ms = lattice_.frame_shift_ms;
    std::vector<int> new_id(xnodes_.size(), -1);
    for (int v : order_) {
      for (int x : copies_[v]) {
        new_id[x] = out.AddNode(lattice_.nodes[v].word, lattice_.nodes[v].time);
      }
    }
    for (const XArc& xa : xarcs_) {
      const Arc& arc = lattice_.arcs[xa.orig_arc];
      const int id = out.AddArc(new_id[xa.src], new_id[xa.dst], arc.ac_score, arc.lm_score);
      out.arcs[id].model_scores = arc.model_scores;
      if (stream) out.arcs[id].model_scores[*stream] = xa.model_score;
    }
    out.start_node = new_id[copies_[lattice_.start_node].front()];
    out.end_node = new_id[copies_[lattice_.end_node].front()];
    return out;
  }

  size_t num_nodes() const { return xnodes_.size(); }
  size_t num_arcs() const { return xarcs_.size(); }

 private:
  int NewCopy(int orig, WordHistory hist) {
    const int x = static_cast<int>(xnodes_.size());
    by_hist_[orig].emplace(hist, x);
    xnodes_.push_back(XNode{orig, std::move(hist)});
    copies_[orig].push_back(x);
    return x;
  }

  const Lattice& lattice_;
  size_t keep_;
  std::vector<NodeKind> kinds_;
  std::vector<int> word_ids_;
  std::unordered_map<std::string, int> ids_;
  std::vector<int> order_;
  std::vector<XNode> xnodes_;
  std::vector<XArc> xarcs_;
  std::vector<std::vector<int>> copies_;
  std::vector<std::unordered_map<WordHistory, int, WordHistoryHash>> by_hist_;
};

}  // namespace

Lattice ExpandNgram(const Lattice& lattice, int n) {
  Expander expander(lattice, n);
  expander.Run([](int, int, const Arc&) { return 0.0; });
  return expander.Build(nullptr);
}

Lattice RescoreLattice(const Lattice& lattice, const Scorer& scorer, const RescoreConfig& config,
                       RescoreStats* stats) {
  for (const Arc& arc : lattice.arcs) {
    if (!arc.post) {
      throw Error(fmt::format("lattice {}: arc {} has no posterior; compute posteriors first",
                              lattice.utterance_id, arc.id));
    }
  }
  if (config.stream_name.empty() || config.stream_name == kAcStream ||
      config.stream_name == kLmStream) {
    throw Error(fmt::format("invalid stream name '{}'", config.stream_name));
  }
  Expander expander(lattice, config.ngram);
  // Without time dependence a state is valid anywhere in the utterance, so
  // the timestamp level collapses.
  RescoreCache cache(scorer.TimeSensitive() ? config.collar : kInfiniteCollar);
  RescoreStats local;
  const size_t keep = static_cast<size_t>(config.ngram - 1);

  const Node& start = lattice.start();
  cache.Insert({}, start.time,
               scorer.BeginUtterance(lattice.utterance_id, lattice.end().time), {});

  auto visit = [&](int xj, int xl, const Arc& arc) -> double {
    const auto& src = expander.xnode(xj);
    const auto& dst = expander.xnode(xl);
    const Node& src_node = lattice.nodes[src.orig];
    const Node& dst_node = lattice.nodes[dst.orig];
    RescoreCache::Entry* src_entry = cache.Lookup(src.hist, src_node.time);
    if (!src_entry) {
      throw Error(fmt::format("lattice {}: no cache entry for node {} (internal error)",
                              lattice.utterance_id, src_node.id));
    }

    try {
      switch (expander.kind(dst.orig)) {
        case NodeKind::kEnd: {
          if (!config.score_eos) return 0.0;
          if (!src_entry->eos) {
            src_entry->eos = scorer.Finish(src_entry->state);
            ++local.scorer_calls;
          }
          return *src_entry->eos;
        }
        case NodeKind::kEpsilon:
        case NodeKind::kWord: {
          const bool is_word = expander.kind(dst.orig) == NodeKind::kWord;
          // Prediction from the source history. Computed before any renewal so
          // that a destination entry aliasing the source cannot leak into it.
          ScorerState next_state = src_entry->state;
          double model_score = 0.0;
          if (is_word) {
            const int w = expander.word_id(dst.orig);
            auto it = src_entry->pred.find(w);
            if (it == src_entry->pred.end()) {
              it = src_entry->pred
                       .emplace(w, scorer.ScoreWord(src_entry->state, dst_node.word, dst_node.time))
                       .first;
              ++local.scorer_calls;
            }
            next_state = it->second.state;
            model_score = it->second.logprob;
          }

          std::vector<double> post = src_entry->post;
          if (is_word) {
            post.push_back(*arc.post);
            KeepLast(post, keep);
          }
          RescoreCache::Entry* dst_entry = cache.Lookup(dst.hist, dst_node.time);
          if (!dst_entry) {
            ++local.cache_misses;
            cache.Insert(dst.hist, dst_node.time, std::move(next_state), std::move(post));
          } else {
            ++local.cache_hits;
            const double sum = std::accumulate(post.begin(), post.end(), 0.0);
            if (sum > dst_entry->PostSum()) {
              ++local.cache_renewals;
              dst_entry->state = std::move(next_state);
              dst_entry->post = std::move(post);
              dst_entry->pred.clear();
              dst_entry->eos.reset();
            }
          }
          return model_score;
        }
        case NodeKind::kStart:
          break;
      }
    } catch (const ScorerError& e) {
      throw ScorerError(fmt::format("lattice {} arc {}: {}", lattice.utterance_id, arc.id, e.what()));
    }
    throw Error(fmt::format("lattice {}: arc {} enters the start node", lattice.utterance_id, arc.id));
  };

  expander.Run(visit);
  Lattice out = expander.Build(&config.stream_name);
  if (stats) {
    local.expanded_nodes = expander.num_nodes();
    local.expanded_arcs = expander.num_arcs();
    local.cache_entries = cache.size();
    *stats = local;
  }
  return out;
}

Hypothesis BestPath(const Lattice& lattice, const Coefficients& coeffs) {
  const auto order = TopologicalOrder(lattice);
  const auto arc_scores = ArcCombinedScores(lattice, coeffs);
  const size_t n = lattice.nodes.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n, kNegInf);
  std::vector<int> next_arc(n, -1);
  best[lattice.end_node] = 0.0;

  // Word sequence of the best suffix leaving `v`.
  auto suffix_words = [&](int first_arc) {
    std::vector<std::string> words;
    for (int a = first_arc; a >= 0;) {
      const int dest = lattice.arcs[a].dest;
      if (!IsNonWord(lattice.nodes[dest].word)) words.push_back(lattice.nodes[dest].word);
      a = next_arc[dest];
    }
    return words;
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (v == lattice.end_node) continue;
    for (int a : lattice.nodes[v].exits) {
      const int dest = lattice.arcs[a].dest;
      if (best[dest] == kNegInf) continue;
      const double score = arc_scores[a] + best[dest];
      bool take = score > best[v];
      if (!take && score == best[v] && next_arc[v] >= 0) {
        take = WordsLess(suffix_words(a), suffix_words(next_arc[v]));
      }
      if (take) {
        best[v] = score;
        next_arc[v] = a;
      }
    }
  }
  if (next_arc[lattice.start_node] < 0) {
    throw Error(fmt::format("lattice {}: no complete path", lattice.utterance_id));
  }
  std::vector<int> path;
  for (int v = lattice.start_node; v != lattice.end_node; v = lattice.arcs[next_arc[v]].dest) {
    path.push_back(next_arc[v]);
  }
  return HypothesisFromArcs(lattice, path);
}

}  // namespace latresc
