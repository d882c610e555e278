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

#include "latresc/wer.h"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "latresc/errors.h"
#include "latresc/lattice.h"
#include "latresc/text_util.h"

namespace latresc {

std::optional<double> WerCounts::rate() const {
  if (ref_words == 0) return std::nullopt;
  return static_cast<double>(errors()) / ref_words;
}

WerCounts& WerCounts::operator+=(const WerCounts& other) {
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  ref_words += other.ref_words;
  return *this;
}

namespace {

std::vector<std::string> Normalize(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    if (IsNonWord(w)) continue;
    std::string lower = w;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back(std::move(lower));
  }
  return out;
}

}  // namespace

Alignment Align(const std::vector<std::string>& ref_in, const std::vector<std::string>& hyp_in) {
  const auto ref = Normalize(ref_in);
  const auto hyp = Normalize(hyp_in);
  const size_t r = ref.size(), h = hyp.size();
  // cost[i][j]: edits turning ref[0,i) into hyp[0,j).
  std::vector<std::vector<int>> cost(r + 1, std::vector<int>(h + 1, 0));
  for (size_t i = 0; i <= r; ++i) cost[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= h; ++j) cost[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= r; ++i) {
    for (size_t j = 1; j <= h; ++j) {
      const int diag = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({diag, cost[i][j - 1] + 1, cost[i - 1][j] + 1});
    }
  }

  Alignment out;
  out.counts.ref_words = static_cast<int>(r);
  size_t i = r, j = h;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (cost[i][j] == cost[i - 1][j - 1] + (same ? 0 : 1)) {
        out.ops.push_back(same ? EditOp::kMatch : EditOp::kSubstitution);
        if (!same) ++out.counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[i][j] == cost[i][j - 1] + 1) {
      out.ops.push_back(EditOp::kInsertion);
      ++out.counts.insertions;
      --j;
      continue;
    }
    out.ops.push_back(EditOp::kDeletion);
    ++out.counts.deletions;
    --i;
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

WerCounts Wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  return Align(ref, hyp).counts;
}

CorpusWer ComputeCorpusWer(const Transcripts& refs, const Transcripts& hyps) {
  std::vector<std::string> missing;
  for (const auto& [id, words] : refs) {
    if (!hyps.contains(id)) missing.push_back(fmt::format("{} (no hypothesis)", id));
  }
  for (const auto& [id, words] : hyps) {
    if (!refs.contains(id)) missing.push_back(fmt::format("{} (no reference)", id));
  }
  if (!missing.empty()) {
    const size_t shown = std::min<size_t>(missing.size(), 10);
    throw Error(fmt::format("utterance id mismatch: {}{}",
                            fmt::join(missing.begin(), missing.begin() + static_cast<long>(shown), ", "),
                            shown < missing.size()
                                ? fmt::format(" and {} more", missing.size() - shown)
                                : ""));
  }
  CorpusWer out;
  for (const auto& [id, ref] : refs) {
    const WerCounts counts = Wer(ref, hyps.at(id));
    out.per_utterance[id] = counts;
    out.total += counts;
  }
  return out;
}

std::vector<LengthBucket> WerrByLength(const Transcripts& refs, const Transcripts& baseline,
                                       const Transcripts& system, const std::vector<int>& edges) {
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end() ||
      (!edges.empty() && edges.front() <= 0)) {
    throw Error("bucket edges must be positive and strictly ascending");
  }
  const CorpusWer base = ComputeCorpusWer(refs, baseline);
  const CorpusWer sys = ComputeCorpusWer(refs, system);

  std::vector<LengthBucket> buckets(edges.size() + 1);
  for (size_t b = 0; b < buckets.size(); ++b) {
    buckets[b].min_words = b == 0 ? 0 : edges[b - 1];
    if (b < edges.size()) buckets[b].max_words = edges[b];
  }
  for (const auto& [id, ref] : refs) {
    const int length = base.per_utterance.at(id).ref_words;
    const auto b = static_cast<size_t>(
        std::upper_bound(edges.begin(), edges.end(), length) - edges.begin());
    buckets[b].num_utterances++;
    buckets[b].baseline += base.per_utterance.at(id);
    buckets[b].system += sys.per_utterance.at(id);
  }
  for (auto& bucket : buckets) {
    const auto base_rate = bucket.baseline.rate();
    const auto sys_rate = bucket.system.rate();
    if (bucket.num_utterances > 0 && base_rate && sys_rate && *base_rate > 0.0) {
      bucket.werr = (*base_rate - *sys_rate) / *base_rate;
    }
  }
  return buckets;
}

Transcripts ParseTranscripts(std::string_view text) {
  Transcripts out;
  int line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto sep = line.find("::");
    if (sep == std::string_view::npos) throw FormatError(line_no, "missing '::' separator");
    std::string id;
    for (auto field : SplitWhitespace(line.substr(0, sep))) {
      if (field.starts_with("UTT=")) id = std::string(field.substr(4));
    }
    if (id.empty()) throw FormatError(line_no, "missing UTT=");
    if (!out.emplace(id, SplitWords(line.substr(sep + 2))).second) {
      throw FormatError(line_no, fmt::format("duplicate utterance '{}'", id));
    }
  }
  return out;
}

std::string SerializeTranscripts(const Transcripts& transcripts) {
  std::string out;
  for (const auto& [id, words] : transcripts) {
    out += fmt::format("UTT={} ::", id);
    for (const auto& w : words) out += " " + w;
    out += '\n';
  }
  return out;
}

}  // namespace latresc
