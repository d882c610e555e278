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

#include "latresc/fixtures.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "latresc/errors.h"
#include "latresc/text_util.h"

namespace latresc {

namespace {

double Round6(double v) { return std::round(v * 1e6) / 1e6; }

const std::vector<std::string>& Vocabulary() {
  static const std::vector<std::string> words = {
      "i",   "we",  "they", "think", "see",   "like", "want",  "the",   "a",     "cat",  "dog",
      "mat", "big", "small", "those", "things", "it",  "on",    "in",    "company", "to", "have"};
  return words;
}

// subject verb object [prepositional phrase]
std::vector<std::string> GrammarSentence(std::mt19937_64& rng) {
  static const std::vector<std::string> subjects = {"i", "we", "they", "the cat", "a dog"};
  static const std::vector<std::string> verbs = {"think", "see", "like", "want"};
  static const std::vector<std::string> objects = {"the mat", "a big dog", "those things", "it",
                                                   "a small cat"};
  static const std::vector<std::string> phrases = {"on the mat", "in a big company", "to have it"};
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
  };
  std::string s = pick(subjects) + " " + pick(verbs) + " " + pick(objects);
  if (std::bernoulli_distribution(0.5)(rng)) s += " " + pick(phrases);
  return SplitWords(s);
}

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::vector<std::string> Corrupt(std::mt19937_64& rng, const std::vector<std::string>& ref) {
  const auto& vocab = Vocabulary();
  std::uniform_int_distribution<size_t> word(0, vocab.size() - 1);
  std::vector<std::string> out = ref;
  const int edits = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int e = 0; e < edits; ++e) {
    const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    if (out.empty() || kind == 1) {
      const size_t pos = std::uniform_int_distribution<size_t>(0, out.size())(rng);
      out.insert(out.begin() + static_cast<long>(pos), vocab[word(rng)]);
    } else {
      const size_t pos = std::uniform_int_distribution<size_t>(0, out.size() - 1)(rng);
      if (kind == 0) {
        out[pos] = vocab[word(rng)];
      } else {
        out.erase(out.begin() + static_cast<long>(pos));
      }
    }
  }
  return out;
}

}  // namespace

TuningCorpus SyntheticTuningCorpus(uint64_t seed, int num_utterances) {
  if (num_utterances < 1) throw Error("need at least one utterance");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ac_shift(-1.0, 1.5), lm_shift(-1.0, 1.0), noise(-5.0, -1.0);
  TuningCorpus corpus;
  corpus.streams = {"lsync_rnn", "oracle", "rnnlm"};
  for (int u = 0; u < num_utterances; ++u) {
    const std::string id = fmt::format("tune{:03d}", u);
    const auto ref = GrammarSentence(rng);
    corpus.refs[id] = ref;
    NBestList list{id, {}};
    const double ref_ac = Round6(-100.0 + noise(rng));
    const double ref_lm = Round6(-20.0 + noise(rng));
    for (int k = 0; k < 7; ++k) {
      Hypothesis h;
      h.utterance_id = id;
      h.words = k == 0 ? ref : Corrupt(rng, ref);
      h.num_words = static_cast<int>(h.words.size());
      h.scores["ac"] = k == 0 ? ref_ac : Round6(ref_ac + ac_shift(rng));
      h.scores["lm"] = k == 0 ? ref_lm : Round6(ref_lm + lm_shift(rng));
      h.scores["rnnlm"] = Round6(noise(rng) * (1 + h.num_words));
      h.scores["lsync_rnn"] = Round6(noise(rng) * (1 + h.num_words));
      h.scores["oracle"] = h.words == ref ? 1.0 : 0.0;
      list.hypotheses.push_back(std::move(h));
    }
    // Order by first-pass score, as an N-best list would be.
    std::stable_sort(list.hypotheses.begin(), list.hypotheses.end(),
                     [](const Hypothesis& a, const Hypothesis& b) {
                       return a.scores.at("ac") + a.scores.at("lm") > b.scores.at("ac") + b.scores.at("lm");
                     });
    corpus.candidates.push_back(std::move(list));
  }
  return corpus;
}

DemoCorpus SyntheticDemoCorpus(uint64_t seed, int num_utterances) {
  if (num_utterances < 1) throw Error("need at least one utterance");
  std::mt19937_64 rng(seed);
  const auto& vocab = Vocabulary();
  std::uniform_int_distribution<size_t> word(0, vocab.size() - 1);
  std::normal_distribution<double> ac_ref(-12.0, 3.0);
  std::uniform_real_distribution<double> ac_gap(-1.5, 4.0), lm(-4.0, -2.0);

  DemoCorpus demo;
  for (int s = 0; s < 400; ++s) demo.lm_text += Join(GrammarSentence(rng)) + "\n";

  for (int u = 0; u < num_utterances; ++u) {
    const std::string id = fmt::format("demo{:03d}", u);
    const auto ref = GrammarSentence(rng);
    demo.refs[id] = ref;

    Lattice lat;
    lat.utterance_id = id;
    const int start = lat.AddNode(std::string(kSentenceStart), 0);
    std::vector<int> prev = {start};
    int64_t t = 0;
    for (const auto& w : ref) {
      t += std::uniform_int_distribution<int>(12, 30)(rng);
      // Reference word plus up to two competitors; sometimes a skip.
      std::vector<std::string> slot = {w};
      const int extra = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int k = 0; k < extra; ++k) {
        std::string alt = vocab[word(rng)];
        if (std::find(slot.begin(), slot.end(), alt) == slot.end()) slot.push_back(alt);
      }
      if (std::bernoulli_distribution(0.15)(rng)) slot.push_back(std::string(kEpsilon));
      std::vector<int> cur;
      std::vector<double> cur_ac;
      const double base = ac_ref(rng);
      for (size_t k = 0; k < slot.size(); ++k) {
        cur.push_back(lat.AddNode(slot[k], t));
        cur_ac.push_back(Round6(k == 0 ? base : base - ac_gap(rng)));
      }
      for (int p : prev) {
        for (size_t k = 0; k < cur.size(); ++k) lat.AddArc(p, cur[k], cur_ac[k], Round6(lm(rng)));
      }
      prev = std::move(cur);
    }
    t += std::uniform_int_distribution<int>(12, 30)(rng);
    const int end = lat.AddNode(std::string(kSentenceEnd), t);
    for (int p : prev) lat.AddArc(p, end, Round6(-1.0), Round6(-1.0));
    lat.ResolveEndpoints();
    CheckValid(lat);
    demo.lattices.push_back(std::move(lat));
  }
  return demo;
}

Lattice RepeatedPhraseLattice() {
  const auto words = SplitWords(
      "i think those are are wonderful things to have but i think in a big company");
  Lattice lat;
  lat.utterance_id = "phrase";
  int prev = lat.AddNode(std::string(kSentenceStart), 0);
  int64_t t = 30;
  for (size_t i = 0; i < words.size(); ++i) {
    t += i == 10 ? 260 : 10;
    const int v = lat.AddNode(words[i], t);
    lat.AddArc(prev, v, -1.0, -1.0);
    prev = v;
  }
  const int end = lat.AddNode(std::string(kSentenceEnd), t + 1);
  lat.AddArc(prev, end, -1.0, -1.0);
  lat.ResolveEndpoints();
  return lat;
}

}  // namespace latresc
