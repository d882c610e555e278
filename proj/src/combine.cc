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

#include "latresc/combine.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "latresc/errors.h"
#include "latresc/text_util.h"

namespace latresc {

namespace {

double Lookup(const std::map<std::string, double>& scores, std::string_view stream) {
  auto it = scores.find(std::string(stream));
  if (it == scores.end()) throw Error(fmt::format("missing score stream '{}'", stream));
  return it->second;
}

void CheckFinite(const Coefficients& c) {
  bool ok = std::isfinite(c.gamma) && std::isfinite(c.kappa);
  for (const auto& [name, w] : c.stream_weights) {
    if (name == kAcStream || name == kLmStream || name.empty()) {
      throw Error(fmt::format("'{}' cannot be used as a weighted stream name", name));
    }
    ok = ok && std::isfinite(w);
  }
  if (!ok) throw Error("coefficients must be finite");
}

}  // namespace

Coefficients Coefficients::Scaled(double factor) const {
  Coefficients out = *this;
  out.gamma *= factor;
  out.kappa *= factor;
  for (auto& [name, w] : out.stream_weights) w *= factor;
  return out;
}

Coefficients Coefficients::ParseInline(std::string_view text) {
  Coefficients c;
  size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = Trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(fmt::format("bad coefficient '{}', expected name=value", item));
    }
    const auto name = Trim(item.substr(0, eq));
    const auto value_text = Trim(item.substr(eq + 1));
    double value = 0;
    const auto [ptr, ec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw Error(fmt::format("bad coefficient value '{}'", value_text));
    }
    if (name == "gamma") {
      c.gamma = value;
    } else if (name == "kappa") {
      c.kappa = value;
    } else {
      c.stream_weights[std::string(name)] = value;
    }
  }
  CheckFinite(c);
  return c;
}

Coefficients Coefficients::FromJson(std::string_view json_text) {
  Coefficients c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto& obj = j.contains("coefficients") ? j.at("coefficients") : j;
    if (obj.contains("gamma")) c.gamma = obj.at("gamma").get<double>();
    if (obj.contains("kappa")) c.kappa = obj.at("kappa").get<double>();
    if (obj.contains("weights")) {
      for (const auto& [name, w] : obj.at("weights").items()) c.stream_weights[name] = w.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("bad coefficients JSON: {}", e.what()));
  }
  CheckFinite(c);
  return c;
}

std::string Coefficients::ToJson() const {
  nlohmann::json j;
  j["gamma"] = gamma;
  j["kappa"] = kappa;
  j["weights"] = nlohmann::json::object();
  for (const auto& [name, w] : stream_weights) j["weights"][name] = w;
  return j.dump();
}

double WeightedStreams(const std::map<std::string, double>& scores, const Coefficients& coeffs) {
  double total = Lookup(scores, kAcStream) + coeffs.gamma * Lookup(scores, kLmStream);
  for (const auto& [name, w] : coeffs.stream_weights) total += w * Lookup(scores, name);
  return total;
}

double CombinedScore(const Hypothesis& hyp, const Coefficients& coeffs) {
  return WeightedStreams(hyp.scores, coeffs) + coeffs.kappa * hyp.num_words;
}

bool WordsLess(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace latresc
