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

#include "latresc/ngram_scorer.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "latresc/errors.h"
#include "latresc/lattice.h"
#include "latresc/text_util.h"

namespace latresc {

namespace {

constexpr int kStartId = -2;
constexpr int kUnknownId = -1;

// Last (order - 1) token ids of the history.
struct NgramState {
  std::vector<int> context;
};

double ParseDouble(std::string_view s, int line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(line, fmt::format("bad number '{}'", s));
  }
  return v;
}

}  // namespace

int NgramScorer::Intern(std::string_view word) {
  if (word == kSentenceStart) return kStartId;
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(std::string(word), id);
  return id;
}

int NgramScorer::Lookup(std::string_view word) const {
  if (word == kSentenceStart) return kStartId;
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnknownId : it->second;
}

void NgramScorer::AddCount(const std::vector<int>& context, int word, double count) {
  ContextStats& stats = stats_[context];
  stats.total += count;
  stats.counts[word] += count;
}

void NgramScorer::Finalize() {
  sentence_end_id_ = Intern(kSentenceEnd);
  num_predicted_ = static_cast<int>(words_.size());
}

NgramScorer NgramScorer::Train(std::string_view corpus, const NgramOptions& options) {
  if (options.order < 1) throw Error("n-gram order must be at least 1");
  if (!(options.discount > 0.0 && options.discount < 1.0)) {
    throw Error("discount must lie in (0, 1)");
  }
  NgramScorer model;
  model.options_ = options;
  bool any = false;
  for (std::string_view line : SplitLines(corpus)) {
    const auto tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    any = true;
    std::vector<int> seq = {kStartId};
    for (auto t : tokens) {
      if (IsNonWord(t)) continue;
      seq.push_back(model.Intern(t));
    }
    seq.push_back(model.Intern(kSentenceEnd));
    for (size_t i = 1; i < seq.size(); ++i) {
      for (int k = 0; k < options.order && k <= static_cast<int>(i) - 1; ++k) {
        std::vector<int> context(seq.begin() + static_cast<long>(i) - k, seq.begin() + static_cast<long>(i));
        model.AddCount(context, seq[i], 1.0);
      }
    }
  }
  if (!any) throw Error("n-gram training corpus is empty");
  model.Finalize();
  return model;
}

std::string NgramScorer::Save() const {
  std::string out = fmt::format("NGRAM order={} discount={} unk_floor={}\n", options_.order,
                                options_.discount, options_.unk_floor);
  auto name = [&](int id) -> std::string_view {
    return id == kStartId ? kSentenceStart : std::string_view(words_[id]);
  };
  // Unigram lines first so that loading interns words in the original order.
  std::vector<std::pair<const std::vector<int>*, const ContextStats*>> ordered;
  for (const auto& [context, stats] : stats_) ordered.emplace_back(&context, &stats);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first->size() < b.first->size(); });
  for (const auto& [context, stats] : ordered) {
    for (const auto& [word, count] : stats->counts) {
      out += fmt::format("{}", count);
      for (int c : *context) out += fmt::format(" {}", name(c));
      out += fmt::format(" {}\n", name(word));
    }
  }
  return out;
}

NgramScorer NgramScorer::Load(std::string_view model_text) {
  NgramScorer model;
  bool have_header = false;
  int line_no = 0;
  for (std::string_view line : SplitLines(model_text)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = SplitWhitespace(line);
    if (!have_header) {
      if (fields.front() != "NGRAM") throw FormatError(line_no, "expected NGRAM header");
      for (size_t i = 1; i < fields.size(); ++i) {
        const auto eq = fields[i].find('=');
        if (eq == std::string_view::npos) throw FormatError(line_no, "bad header field");
        const auto key = fields[i].substr(0, eq);
        const double value = ParseDouble(fields[i].substr(eq + 1), line_no);
        if (key == "order") {
          model.options_.order = static_cast<int>(value);
        } else if (key == "discount") {
          model.options_.discount = value;
        } else if (key == "unk_floor") {
          model.options_.unk_floor = value;
        } else {
          throw FormatError(line_no, fmt::format("unknown header field '{}'", key));
        }
      }
      have_header = true;
      continue;
    }
    if (fields.size() < 2) throw FormatError(line_no, "expected '<count> w1 .. wk'");
    const double count = ParseDouble(fields[0], line_no);
    if (static_cast<int>(fields.size()) - 1 > model.options_.order) {
      throw FormatError(line_no, "n-gram longer than the declared order");
    }
    std::vector<int> context;
    for (size_t i = 1; i + 1 < fields.size(); ++i) context.push_back(model.Intern(fields[i]));
    if (fields.back() == kSentenceStart) throw FormatError(line_no, "<s> cannot be predicted");
    model.AddCount(context, model.Intern(fields.back()), count);
  }
  if (!have_header) throw Error("n-gram model is empty");
  model.Finalize();
  return model;
}

double NgramScorer::ProbIds(std::span<const int> context, int word) const {
  if (word < 0) return 0.0;
  const double d = options_.discount;
  double p = 1.0 / num_predicted_;
  const int max_k = std::min<int>(static_cast<int>(context.size()), options_.order - 1);
  std::vector<int> key;
  for (int k = 0; k <= max_k; ++k) {
    key.assign(context.end() - k, context.end());
    auto it = stats_.find(key);
    if (it == stats_.end()) continue;
    const ContextStats& s = it->second;
    auto c = s.counts.find(word);
    const double cw = c == s.counts.end() ? 0.0 : c->second;
    p = std::max(cw - d, 0.0) / s.total + d * static_cast<double>(s.counts.size()) / s.total * p;
  }
  return p;
}

double NgramScorer::Prob(std::span<const std::string> context, std::string_view word) const {
  std::vector<int> ids;
  for (const auto& w : context) ids.push_back(Lookup(w));
  return ProbIds(ids, Lookup(word));
}

ScorerState NgramScorer::BeginUtterance(std::string_view, int64_t) const {
  NgramState state;
  if (options_.order > 1) state.context.push_back(kStartId);
  return ScorerState::Make(std::move(state));
}

StepResult NgramScorer::ScoreWord(const ScorerState& state, std::string_view word,
                                  int64_t) const {
  const auto& s = state.Get<NgramState>();
  const int id = Lookup(word);
  const double p = ProbIds(s.context, id);
  const double logprob = p > 0.0 ? std::log(p) : options_.unk_floor;
  NgramState next;
  next.context = s.context;
  next.context.push_back(id);
  const size_t keep = static_cast<size_t>(std::max(options_.order - 1, 0));
  if (next.context.size() > keep) {
    next.context.erase(next.context.begin(),
                       next.context.end() - static_cast<long>(keep));
  }
  return {ScorerState::Make(std::move(next)), logprob};
}

double NgramScorer::Finish(const ScorerState& state) const {
  return std::log(ProbIds(state.Get<NgramState>().context, sentence_end_id_));
}

}  // namespace latresc
