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

#include "latresc/nbest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "latresc/errors.h"
#include "latresc/lattice_paths.h"
#include "latresc/text_util.h"

namespace latresc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PartialPath {
  int node;
  int arc;     // arc that reached `node`, -1 at the start
  int parent;  // index into the arena, -1 at the start
  double score;
};

struct QueueItem {
  double priority;  // score so far + best completion
  int64_t seq;
  int path;
};

struct QueueOrder {
  bool operator()(const QueueItem& a, const QueueItem& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq > b.seq;
  }
};

struct Scored {
  double score;
  Hypothesis hyp;
};

bool BetterScored(const Scored& a, const Scored& b) {
  if (a.score != b.score) return a.score > b.score;
  return WordsLess(a.hyp.words, b.hyp.words);
}

}  // namespace

NBestList ExtractNBest(const Lattice& lattice, int n, const Coefficients& coeffs,
                       const NBestOptions& options) {
  if (n < 1) throw Error("N-best size must be at least 1");
  const auto order = TopologicalOrder(lattice);
  const auto arc_scores = ArcCombinedScores(lattice, coeffs);

  std::vector<double> completion(lattice.nodes.size(), kNegInf);
  completion[lattice.end_node] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int a : lattice.nodes[*it].exits) {
      completion[*it] =
          std::max(completion[*it], arc_scores[a] + completion[lattice.arcs[a].dest]);
    }
  }
  if (completion[lattice.start_node] == kNegInf) {
    throw Error(fmt::format("lattice {}: no complete path", lattice.utterance_id));
  }

  std::vector<PartialPath> arena;
  std::priority_queue<QueueItem, std::vector<QueueItem>, QueueOrder> queue;
  int64_t seq = 0;
  arena.push_back({lattice.start_node, -1, -1, 0.0});
  queue.push({completion[lattice.start_node], seq++, 0});

  std::vector<Scored> found;
  std::set<std::vector<std::string>> seen;
  double cutoff = kNegInf;  // score of the n-th accepted sequence

  while (!queue.empty()) {
    const QueueItem item = queue.top();
    if (static_cast<int>(found.size()) >= n && item.priority < cutoff) break;
    queue.pop();
    const PartialPath path = arena[item.path];

    if (path.node == lattice.end_node) {
      std::vector<int> arcs;
      for (int p = item.path; arena[p].arc >= 0; p = arena[p].parent) arcs.push_back(arena[p].arc);
      std::reverse(arcs.begin(), arcs.end());
      Hypothesis hyp = HypothesisFromArcs(lattice, arcs);
      if (options.dedup && !seen.insert(hyp.words).second) continue;
      found.push_back({path.score, std::move(hyp)});
      if (static_cast<int>(found.size()) == n) cutoff = path.score;
      continue;
    }
    for (int a : lattice.nodes[path.node].exits) {
      const int dest = lattice.arcs[a].dest;
      if (completion[dest] == kNegInf) continue;
      const double score = path.score + arc_scores[a];
      arena.push_back({dest, a, item.path, score});
      queue.push({score + completion[dest], seq++, static_cast<int>(arena.size()) - 1});
    }
  }

  // Paths tied with the n-th score were all collected; order them and cut.
  std::stable_sort(found.begin(), found.end(), BetterScored);
  if (static_cast<int>(found.size()) > n) found.resize(n);

  NBestList out;
  out.utterance_id = lattice.utterance_id;
  for (auto& s : found) out.hypotheses.push_back(std::move(s.hyp));
  return out;
}

NBestList RescoreNBest(const NBestList& nbest, const Scorer& scorer, const std::string& stream_name,
                       const RescoreNBestOptions& options) {
  if (stream_name.empty() || stream_name == kAcStream || stream_name == kLmStream) {
    throw Error(fmt::format("invalid stream name '{}'", stream_name));
  }
  NBestList out = nbest;
  for (size_t i = 0; i < out.hypotheses.size(); ++i) {
    Hypothesis& hyp = out.hypotheses[i];
    double score = 0.0;
    try {
      score = scorer.ScoreSequence(nbest.utterance_id, hyp.words, {}, options.score_eos);
    } catch (const ScorerError& e) {
      throw ScorerError(fmt::format("utterance {} hypothesis {}: {}", nbest.utterance_id, i, e.what()));
    }
    if (options.length_normalize) {
      const size_t tokens = hyp.words.size() + (options.score_eos ? 1 : 0);
      if (tokens > 0) score /= static_cast<double>(tokens);
    }
    hyp.scores[stream_name] = score;
  }
  return out;
}

Hypothesis SelectBest(const NBestList& nbest, const Coefficients& coeffs) {
  if (nbest.hypotheses.empty()) {
    throw Error(fmt::format("utterance {}: empty N-best list", nbest.utterance_id));
  }
  const Hypothesis* best = nullptr;
  double best_score = kNegInf;
  for (const Hypothesis& hyp : nbest.hypotheses) {
    const double score = CombinedScore(hyp, coeffs);
    if (!best || score > best_score || (score == best_score && WordsLess(hyp.words, best->words))) {
      best = &hyp;
      best_score = score;
    }
  }
  return *best;
}

std::string SerializeNBest(const NBestList& nbest) {
  std::string out;
  int rank = 1;
  for (const Hypothesis& hyp : nbest.hypotheses) {
    out += fmt::format("UTT={} RANK={}", nbest.utterance_id, rank++);
    auto emit = [&](std::string_view name) {
      auto it = hyp.scores.find(std::string(name));
      if (it != hyp.scores.end()) out += fmt::format(" {}={:.6f}", name, it->second);
    };
    emit(kAcStream);
    emit(kLmStream);
    for (const auto& [name, value] : hyp.scores) {
      if (name != kAcStream && name != kLmStream) out += fmt::format(" {}={:.6f}", name, value);
    }
    out += fmt::format(" NW={} ::", hyp.num_words);
    for (const auto& w : hyp.words) out += " " + w;
    out += '\n';
  }
  return out;
}

std::vector<NBestList> ParseNBest(std::string_view text) {
  std::vector<NBestList> lists;
  std::unordered_map<std::string, size_t> index;
  int line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto sep = line.find("::");
    if (sep == std::string_view::npos) throw FormatError(line_no, "missing '::' separator");
    Hypothesis hyp;
    bool have_nw = false;
    for (auto field : SplitWhitespace(line.substr(0, sep))) {
      const auto eq = field.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw FormatError(line_no, fmt::format("expected key=value, got '{}'", field));
      }
      const auto key = field.substr(0, eq);
      const auto value = field.substr(eq + 1);
      if (key == "UTT") {
        hyp.utterance_id = std::string(value);
      } else if (key == "RANK") {
        continue;
      } else if (key == "NW") {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), hyp.num_words);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw FormatError(line_no, fmt::format("bad NW value '{}'", value));
        }
        have_nw = true;
      } else {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw FormatError(line_no, fmt::format("bad value '{}' for {}", value, key));
        }
        hyp.scores[std::string(key)] = v;
      }
    }
    if (hyp.utterance_id.empty()) throw FormatError(line_no, "missing UTT=");
    if (!hyp.scores.contains(std::string(kAcStream)) || !hyp.scores.contains(std::string(kLmStream))) {
      throw FormatError(line_no, "hypothesis needs ac= and lm=");
    }
    hyp.words = SplitWords(line.substr(sep + 2));
    if (!have_nw) hyp.num_words = static_cast<int>(hyp.words.size());
    if (hyp.num_words != static_cast<int>(hyp.words.size())) {
      throw FormatError(line_no, fmt::format("NW={} but {} words", hyp.num_words, hyp.words.size()));
    }
    auto [it, inserted] = index.try_emplace(hyp.utterance_id, lists.size());
    if (inserted) lists.push_back(NBestList{hyp.utterance_id, {}});
    lists[it->second].hypotheses.push_back(std::move(hyp));
  }
  return lists;
}

}  // namespace latresc
