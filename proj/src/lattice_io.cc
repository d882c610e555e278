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

#include "latresc/lattice_io.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

#include "latresc/text_util.h"

namespace latresc {

namespace {

struct NodeRecord {
  int id;
  int64_t time;
  std::string word;
  int line;
};

struct ArcRecord {
  Arc arc;
  int line;
};

template <typename T>
T ParseNumber(std::string_view value, std::string_view key, int line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw FormatError(line, fmt::format("bad value '{}' for {}", value, key));
  }
  return out;
}

std::pair<std::string_view, std::string_view> SplitField(std::string_view field, int line) {
  const auto eq = field.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw FormatError(line, fmt::format("expected key=value, got '{}'", field));
  }
  return {field.substr(0, eq), field.substr(eq + 1)};
}

}  // namespace

Lattice ParseLattice(std::string_view text) {
  Lattice lattice;
  bool have_header = false;
  int declared_nodes = -1;
  int declared_arcs = -1;
  std::vector<NodeRecord> node_records;
  std::vector<ArcRecord> arc_records;

  int line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = SplitWhitespace(line);
    const auto [first_key, first_value] = SplitField(fields.front(), line_no);

    if (first_key == "UTT") {
      if (have_header) throw FormatError(line_no, "duplicate header line");
      have_header = true;
      lattice.utterance_id = std::string(first_value);
      for (size_t i = 1; i < fields.size(); ++i) {
        const auto [key, value] = SplitField(fields[i], line_no);
        if (key == "FRAMESHIFT") {
          lattice.frame_shift_ms = ParseNumber<double>(value, key, line_no);
        } else if (key == "N") {
          declared_nodes = ParseNumber<int>(value, key, line_no);
        } else if (key == "L") {
          declared_arcs = ParseNumber<int>(value, key, line_no);
        } else {
          throw FormatError(line_no, fmt::format("unknown header field '{}'", key));
        }
      }
      if (declared_nodes < 0 || declared_arcs < 0) {
        throw FormatError(line_no, "header must declare N= and L=");
      }
      continue;
    }
    if (!have_header) throw FormatError(line_no, "expected UTT= header line first");

    if (first_key == "I") {
      NodeRecord rec{ParseNumber<int>(first_value, "I", line_no), -1, {}, line_no};
      for (size_t i = 1; i < fields.size(); ++i) {
        const auto [key, value] = SplitField(fields[i], line_no);
        if (key == "t") {
          rec.time = ParseNumber<int64_t>(value, key, line_no);
        } else if (key == "W") {
          rec.word = std::string(value);
        } else {
          throw FormatError(line_no, fmt::format("unknown node field '{}'", key));
        }
      }
      if (rec.time < 0) throw FormatError(line_no, "node needs a non-negative t=");
      if (rec.word.empty()) throw FormatError(line_no, "node needs W=");
      node_records.push_back(std::move(rec));
    } else if (first_key == "J") {
      ArcRecord rec{Arc{}, line_no};
      rec.arc.id = ParseNumber<int>(first_value, "J", line_no);
      bool has_s = false, has_e = false, has_a = false, has_l = false;
      for (size_t i = 1; i < fields.size(); ++i) {
        const auto [key, value] = SplitField(fields[i], line_no);
        if (key == "S") {
          rec.arc.source = ParseNumber<int>(value, key, line_no);
          has_s = true;
        } else if (key == "E") {
          rec.arc.dest = ParseNumber<int>(value, key, line_no);
          has_e = true;
        } else if (key == "a") {
          rec.arc.ac_score = ParseNumber<double>(value, key, line_no);
          has_a = true;
        } else if (key == "l") {
          rec.arc.lm_score = ParseNumber<double>(value, key, line_no);
          has_l = true;
        } else if (key == "p") {
          rec.arc.post = ParseNumber<double>(value, key, line_no);
        } else if (key.starts_with("m:") && key.size() > 2) {
          const std::string stream(key.substr(2));
          if (!rec.arc.model_scores.emplace(stream, ParseNumber<double>(value, key, line_no))
                   .second) {
            throw FormatError(line_no, fmt::format("duplicate stream '{}'", stream));
          }
        } else {
          throw FormatError(line_no, fmt::format("unknown arc field '{}'", key));
        }
      }
      if (!(has_s && has_e && has_a && has_l)) {
        throw FormatError(line_no, "arc needs S=, E=, a= and l=");
      }
      arc_records.push_back(std::move(rec));
    } else {
      throw FormatError(line_no, fmt::format("unknown record type '{}'", first_key));
    }
  }
  if (!have_header) throw FormatError(line_no, "missing UTT= header line");

  if (static_cast<int>(node_records.size()) != declared_nodes) {
    throw FormatError(line_no, fmt::format("header declares N={} but {} node lines found",
                                           declared_nodes, node_records.size()));
  }
  if (static_cast<int>(arc_records.size()) != declared_arcs) {
    throw FormatError(line_no, fmt::format("header declares L={} but {} arc lines found",
                                           declared_arcs, arc_records.size()));
  }

  std::vector<const NodeRecord*> nodes_by_id(declared_nodes, nullptr);
  for (const auto& rec : node_records) {
    if (rec.id < 0 || rec.id >= declared_nodes) {
      throw FormatError(rec.line, fmt::format("node id {} outside 0..{}", rec.id, declared_nodes - 1));
    }
    if (nodes_by_id[rec.id]) throw FormatError(rec.line, fmt::format("duplicate node id {}", rec.id));
    nodes_by_id[rec.id] = &rec;
  }
  std::vector<const ArcRecord*> arcs_by_id(declared_arcs, nullptr);
  for (const auto& rec : arc_records) {
    const int id = rec.arc.id;
    if (id < 0 || id >= declared_arcs) {
      throw FormatError(rec.line, fmt::format("arc id {} outside 0..{}", id, declared_arcs - 1));
    }
    if (arcs_by_id[id]) throw FormatError(rec.line, fmt::format("duplicate arc id {}", id));
    if (rec.arc.source < 0 || rec.arc.source >= declared_nodes || rec.arc.dest < 0 ||
        rec.arc.dest >= declared_nodes) {
      throw FormatError(rec.line, fmt::format("arc {} references a missing node", id));
    }
    arcs_by_id[id] = &rec;
  }

  for (const NodeRecord* rec : nodes_by_id) lattice.AddNode(rec->word, rec->time);
  for (const ArcRecord* rec : arcs_by_id) {
    const int id =
        lattice.AddArc(rec->arc.source, rec->arc.dest, rec->arc.ac_score, rec->arc.lm_score);
    lattice.arcs[id].post = rec->arc.post;
    lattice.arcs[id].model_scores = rec->arc.model_scores;
  }
  lattice.ResolveEndpoints();
  CheckValid(lattice);
  return lattice;
}

std::string SerializeLattice(const Lattice& lattice) {
  std::string out = fmt::format("UTT={} FRAMESHIFT={} N={} L={}\n", lattice.utterance_id,
                                lattice.frame_shift_ms, lattice.nodes.size(), lattice.arcs.size());
  for (const Node& node : lattice.nodes) {
    out += fmt::format("I={} t={} W={}\n", node.id, node.time, node.word);
  }
  for (const Arc& arc : lattice.arcs) {
    out += fmt::format("J={} S={} E={} a={:.6f} l={:.6f}", arc.id, arc.source, arc.dest,
                       arc.ac_score, arc.lm_score);
    if (arc.post) out += fmt::format(" p={:.6f}", *arc.post);
    for (const auto& [stream, score] : arc.model_scores) {
      out += fmt::format(" m:{}={:.6f}", stream, score);
    }
    out += '\n';
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", tmp));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(fmt::format("write failed for {}", tmp));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(fmt::format("cannot rename {} to {}: {}", tmp, path, ec.message()));
}

Lattice ReadLatticeFile(const std::string& path) {
  try {
    return ParseLattice(ReadFile(path));
  } catch (const FormatError& e) {
    throw Error(fmt::format("{}: {}", path, e.what()));
  } catch (const ValidationError& e) {
    std::vector<std::string> violations;
    for (const auto& v : e.violations()) violations.push_back(fmt::format("{}: {}", path, v));
    throw ValidationError(std::move(violations));
  }
}

void WriteLatticeFile(const std::string& path, const Lattice& lattice) {
  WriteFileAtomic(path, SerializeLattice(lattice));
}

}  // namespace latresc
