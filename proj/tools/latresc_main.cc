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

// latresc: second-pass rescoring and system combination over word lattices.
//
// Exit codes: 0 success, 1 data or validation error, 2 usage error,
// 3 external scorer failure. Flags fall back to LATRESC_* environment
// variables where noted in --help.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "latresc/combine.h"
#include "latresc/errors.h"
#include "latresc/fixtures.h"
#include "latresc/lattice.h"
#include "latresc/lattice_io.h"
#include "latresc/lattice_ops.h"
#include "latresc/nbest.h"
#include "latresc/ngram_scorer.h"
#include "latresc/rescore.h"
#include "latresc/scorer_spec.h"
#include "latresc/text_util.h"
#include "latresc/tune.h"
#include "latresc/wer.h"

namespace fs = std::filesystem;

namespace latresc {
namespace {

enum ExitCode { kOk = 0, kDataError = 1, kUsageError = 2, kScorerFailure = 3 };

int CodeFor(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ScorerError&) {
    return kScorerFailure;
  } catch (...) {
    return kDataError;
  }
}

// ---- inputs -------------------------------------------------------------

// Directories expand to their regular files (sorted, dotfiles skipped);
// manifests list one path per line, relative to the manifest's directory.
std::vector<std::string> ExpandInputs(const std::vector<std::string>& paths,
                                      const std::vector<std::string>& manifests) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename().string().front() == '.') continue;
        files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else if (fs::exists(p)) {
      out.push_back(p);
    } else {
      throw Error(fmt::format("{}: no such file or directory", p));
    }
  }
  for (const auto& m : manifests) {
    const fs::path base = fs::path(m).parent_path();
    const std::string text = ReadFile(m);
    for (auto line : SplitLines(text)) {
      line = Trim(line);
      if (line.empty() || line.front() == '#') continue;
      fs::path p(line);
      out.push_back((p.is_absolute() ? p : base / p).string());
    }
  }
  if (out.empty()) throw Error("no input files");
  return out;
}

std::string OutputFor(const std::string& out_dir, const std::string& input) {
  return (fs::path(out_dir) / fs::path(input).filename()).string();
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("{}: cannot create directory: {}", dir, ec.message()));
}

Coefficients ReadCoefficients(const std::string& arg) {
  if (arg.empty()) return {};
  if (fs::is_regular_file(arg)) {
    try {
      return Coefficients::FromJson(ReadFile(arg));
    } catch (const Error& e) {
      throw Error(fmt::format("{}: {}", arg, e.what()));
    }
  }
  return Coefficients::ParseInline(arg);
}

std::vector<NBestList> ReadNBestFile(const std::string& path) {
  try {
    return ParseNBest(ReadFile(path));
  } catch (const FormatError& e) {
    throw Error(fmt::format("{}: {}", path, e.what()));
  }
}

Transcripts ReadTranscriptsFile(const std::string& path) {
  try {
    return ParseTranscripts(ReadFile(path));
  } catch (const FormatError& e) {
    throw Error(fmt::format("{}: {}", path, e.what()));
  }
}

// N-best lines carry "RANK=" and "::"; lattices start with a "UTT=... N=" header.
bool LooksLikeNBest(const std::string& text) {
  for (auto line : SplitLines(text)) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    return line.find(" RANK=") != std::string_view::npos &&
           line.find("::") != std::string_view::npos;
  }
  return false;
}

// ---- worker pool --------------------------------------------------------

// Runs fn(i, worker) for every item on `jobs` threads. Failures are
// reported in input order once everything has finished.
int RunBatch(const std::vector<std::string>& inputs, int jobs,
             const std::function<void(size_t, int)>& fn) {
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<size_t> next{0};
  auto work = [&](int worker) {
    for (size_t i = next++; i < inputs.size(); i = next++) {
      try {
        fn(i, worker);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(inputs.size())));
  std::vector<std::thread> threads;
  for (int w = 1; w < n; ++w) threads.emplace_back(work, w);
  work(0);
  for (auto& t : threads) t.join();

  int code = kOk;
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ValidationError& e) {
      for (const auto& v : e.violations()) std::cerr << v << "\n";
    } catch (const std::exception& e) {
      const std::string what = e.what();
      // File readers already name the file.
      if (what.rfind(inputs[i] + ":", 0) == 0) {
        std::cerr << what << "\n";
      } else {
        std::cerr << inputs[i] << ": " << what << "\n";
      }
    }
    code = std::max(code, CodeFor(errors[i]));
  }
  return code;
}

// One scorer per worker: external scorers serialize requests per process.
std::vector<std::shared_ptr<const Scorer>> MakeScorers(const std::string& spec, int jobs) {
  std::vector<std::shared_ptr<const Scorer>> scorers;
  scorers.push_back(MakeScorer(spec));
  const bool external = spec.rfind("external:", 0) == 0;
  for (int w = 1; w < jobs; ++w) scorers.push_back(external ? MakeScorer(spec) : scorers.front());
  return scorers;
}

int64_t ParseCollar(const std::string& text) {
  if (text == "inf" || text == "infinite") return kInfiniteCollar;
  try {
    size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--collar", "expected a non-negative frame count or 'inf'");
}

std::string Percent(std::optional<double> rate) {
  return rate ? fmt::format("{:.1f}%", 100.0 * *rate) : "n/a";
}

// ---- commands -----------------------------------------------------------

struct Inputs {
  std::vector<std::string> paths;
  std::vector<std::string> manifests;

  void Register(CLI::App* cmd) {
    cmd->add_option("inputs", paths, "Input files or directories");
    cmd->add_option("--manifest", manifests, "File listing one input path per line");
  }
  std::vector<std::string> Expand() const { return ExpandInputs(paths, manifests); }
};

struct Scales {
  ScoreScales scales;
  void Register(CLI::App* cmd) {
    cmd->add_option("--ac-scale", scales.ac_scale, "Acoustic score scale")->capture_default_str();
    cmd->add_option("--lm-scale", scales.lm_scale, "LM score scale")->capture_default_str();
  }
};

int CmdValidate(const Inputs& in, int jobs) {
  const auto files = in.Expand();
  const int code = RunBatch(files, jobs, [&](size_t i, int) { ReadLatticeFile(files[i]); });
  return code;
}

int CmdPosteriors(const Inputs& in, const std::string& out_dir, const Scales& s, int jobs) {
  const auto files = in.Expand();
  EnsureDir(out_dir);
  return RunBatch(files, jobs, [&](size_t i, int) {
    WriteLatticeFile(OutputFor(out_dir, files[i]),
                     ComputeArcPosteriors(ReadLatticeFile(files[i]), s.scales));
  });
}

int CmdPrune(const Inputs& in, const std::string& out_dir, const PruneOptions& opt, int jobs) {
  const auto files = in.Expand();
  EnsureDir(out_dir);
  return RunBatch(files, jobs, [&](size_t i, int) {
    WriteLatticeFile(OutputFor(out_dir, files[i]), Prune(ReadLatticeFile(files[i]), opt));
  });
}

int CmdStats(const Inputs& in, int jobs) {
  const auto files = in.Expand();
  std::vector<std::optional<LatticeStats>> stats(files.size());
  const int code = RunBatch(files, jobs, [&](size_t i, int) { stats[i] = Stats(ReadLatticeFile(files[i])); });
  std::cout << "file\tnodes\tarcs\tseconds\tdensity\n";
  double sum = 0;
  int counted = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    if (!stats[i]) continue;
    const auto& st = *stats[i];
    std::cout << fmt::format("{}\t{}\t{}\t{:.2f}\t{}\n", files[i], st.num_nodes, st.num_arcs,
                             st.duration_sec,
                             st.density ? fmt::format("{:.1f}", *st.density) : "n/a");
    if (st.density) {
      sum += *st.density;
      ++counted;
    }
  }
  std::cout << "mean density\t" << (counted ? fmt::format("{:.1f}", sum / counted) : "n/a") << "\n";
  return code;
}

struct RescoreFlags {
  std::string scorer;
  std::string collar = "9";
  RescoreConfig config;
  bool no_eos = false;
  bool show_stats = false;
};

int CmdRescoreLattice(const Inputs& in, const std::string& out_dir, RescoreFlags f, int jobs) {
  f.config.collar = ParseCollar(f.collar);
  f.config.score_eos = !f.no_eos;
  const auto files = in.Expand();
  const auto scorers = MakeScorers(f.scorer, jobs);
  EnsureDir(out_dir);
  std::vector<RescoreStats> stats(files.size());
  const int code = RunBatch(files, jobs, [&](size_t i, int worker) {
    const Lattice out = RescoreLattice(ReadLatticeFile(files[i]), *scorers[static_cast<size_t>(worker)],
                                       f.config, &stats[i]);
    WriteLatticeFile(OutputFor(out_dir, files[i]), out);
  });
  if (f.show_stats) {
    std::cout << "file\tnodes\tarcs\tentries\thits\tmisses\trenewals\tcalls\n";
    for (size_t i = 0; i < files.size(); ++i) {
      const auto& s = stats[i];
      std::cout << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", files[i], s.expanded_nodes,
                               s.expanded_arcs, s.cache_entries, s.cache_hits, s.cache_misses,
                               s.cache_renewals, s.scorer_calls);
    }
  }
  return code;
}

int CmdNBest(const Inputs& in, const std::string& out, int n, const std::string& coeffs,
             bool keep_duplicates, int jobs) {
  const auto files = in.Expand();
  const Coefficients c = ReadCoefficients(coeffs);
  std::vector<std::string> parts(files.size());
  const int code = RunBatch(files, jobs, [&](size_t i, int) {
    parts[i] = SerializeNBest(ExtractNBest(ReadLatticeFile(files[i]), n, c, {!keep_duplicates}));
  });
  if (code != kOk) return code;
  std::string text;
  for (const auto& p : parts) text += p;
  WriteFileAtomic(out, text);
  return kOk;
}

int CmdRescoreNBest(const Inputs& in, const std::string& out, const std::string& scorer_spec,
                    const std::string& stream, bool no_eos, bool length_normalize, int jobs) {
  std::vector<NBestList> lists;
  for (const auto& f : in.Expand()) {
    auto part = ReadNBestFile(f);
    lists.insert(lists.end(), part.begin(), part.end());
  }
  const auto scorers = MakeScorers(scorer_spec, jobs);
  std::vector<std::string> ids, parts(lists.size());
  for (const auto& l : lists) ids.push_back(l.utterance_id);
  const int code = RunBatch(ids, jobs, [&](size_t i, int worker) {
    parts[i] = SerializeNBest(RescoreNBest(lists[i], *scorers[static_cast<size_t>(worker)], stream,
                                           {!no_eos, length_normalize}));
  });
  if (code != kOk) return code;
  std::string text;
  for (const auto& p : parts) text += p;
  WriteFileAtomic(out, text);
  return kOk;
}

// Lattices go through the best path search, N-best files through SelectBest.
int CmdSelect(const Inputs& in, const std::string& out, const std::string& coeffs, int jobs) {
  const auto files = in.Expand();
  const Coefficients c = ReadCoefficients(coeffs);
  std::vector<std::vector<Hypothesis>> best(files.size());
  int code = RunBatch(files, jobs, [&](size_t i, int) {
    const std::string text = ReadFile(files[i]);
    if (LooksLikeNBest(text)) {
      for (const auto& list : ReadNBestFile(files[i])) best[i].push_back(SelectBest(list, c));
    } else {
      best[i].push_back(BestPath(ReadLatticeFile(files[i]), c));
    }
  });
  if (code != kOk) return code;
  Transcripts hyps;
  for (size_t i = 0; i < files.size(); ++i) {
    for (const auto& h : best[i]) {
      if (!hyps.emplace(h.utterance_id, h.words).second) {
        std::cerr << files[i] << ": duplicate utterance id " << h.utterance_id << "\n";
        code = kDataError;
      }
    }
  }
  if (code != kOk) return code;
  WriteFileAtomic(out, SerializeTranscripts(hyps));
  return kOk;
}

struct TuneFlags {
  std::string refs;
  std::string init;
  std::string out;
  std::optional<double> sigma0;
  TuneOptions options;
};

int CmdTune(const Inputs& in, TuneFlags f) {
  std::vector<NBestList> lists;
  for (const auto& path : in.Expand()) {
    auto part = ReadNBestFile(path);
    lists.insert(lists.end(), part.begin(), part.end());
  }
  const Transcripts refs = ReadTranscriptsFile(f.refs);
  Coefficients init = ReadCoefficients(f.init);
  if (f.init.empty()) {
    // First-pass only: every stream found in the lists starts at weight 0.
    for (const auto& l : lists) {
      for (const auto& h : l.hypotheses) {
        for (const auto& [name, v] : h.scores) {
          if (name != kAcStream && name != kLmStream) init.stream_weights[name] = 0.0;
        }
      }
    }
  }
  f.options.sigma0 = f.sigma0;
  const TuneReport report = TuneCmaes(lists, refs, init, f.options);
  if (report.best_coeffs == report.init_coeffs) std::cerr << "warning: " << report.note << "\n";
  const std::string json = report.ToJson() + "\n";
  if (f.out.empty()) {
    std::cout << json;
  } else {
    WriteFileAtomic(f.out, json);
  }
  std::cerr << fmt::format("WER {} -> {} after {} evaluations ({})\n", Percent(report.init_wer),
                           Percent(report.dev_wer), report.evaluations, report.note);
  return kOk;
}

int CmdScore(const std::string& ref_path, const std::string& hyp_path,
             const std::string& baseline_path, const std::vector<int>& buckets) {
  const Transcripts refs = ReadTranscriptsFile(ref_path);
  const Transcripts hyps = ReadTranscriptsFile(hyp_path);
  const CorpusWer wer = ComputeCorpusWer(refs, hyps);
  const auto& t = wer.total;
  std::cout << fmt::format("WER {} [ {} / {}, {} sub, {} ins, {} del ] over {} utterances\n",
                           Percent(t.rate()), t.errors(), t.ref_words, t.substitutions,
                           t.insertions, t.deletions, refs.size());
  if (!baseline_path.empty()) {
    const Transcripts baseline = ReadTranscriptsFile(baseline_path);
    const CorpusWer base = ComputeCorpusWer(refs, baseline);
    std::cout << fmt::format("baseline WER {}\n", Percent(base.total.rate()));
    if (!buckets.empty()) {
      std::cout << fmt::format("{:<12}{:>8}{:>12}{:>12}{:>10}\n", "ref words", "utts",
                               "baseline", "system", "WERR");
      for (const auto& b : WerrByLength(refs, baseline, hyps, buckets)) {
        const std::string range = b.max_words ? fmt::format("[{},{})", b.min_words, *b.max_words)
                                              : fmt::format("[{},inf)", b.min_words);
        std::cout << fmt::format("{:<12}{:>8}{:>12}{:>12}{:>10}\n", range, b.num_utterances,
                                 Percent(b.baseline.rate()), Percent(b.system.rate()),
                                 Percent(b.werr));
      }
    }
  }
  return kOk;
}

int CmdTrainNgram(const std::string& text_path, const std::string& out, const NgramOptions& opt) {
  WriteFileAtomic(out, NgramScorer::Train(ReadFile(text_path), opt).Save());
  return kOk;
}

// Demo lattices, references, LM text and model, the repeated-phrase
// lattice and a tuning corpus, all determined by the seed.
int CmdGenFixtures(const std::string& out_dir, uint64_t seed, int utterances,
                   int tune_utterances) {
  const DemoCorpus demo = SyntheticDemoCorpus(seed, utterances);
  EnsureDir(out_dir + "/lattices");
  std::string manifest;
  for (const auto& lat : demo.lattices) {
    const std::string name = "lattices/" + lat.utterance_id + ".lat";
    WriteLatticeFile(out_dir + "/" + name, lat);
    manifest += name + "\n";
  }
  WriteFileAtomic(out_dir + "/manifest.txt", manifest);
  WriteFileAtomic(out_dir + "/refs.txt", SerializeTranscripts(demo.refs));
  WriteFileAtomic(out_dir + "/lm_train.txt", demo.lm_text);
  WriteFileAtomic(out_dir + "/lm.ngram", NgramScorer::Train(demo.lm_text, {}).Save());
  WriteLatticeFile(out_dir + "/repeated_phrase.lat", RepeatedPhraseLattice());

  const TuningCorpus tune = SyntheticTuningCorpus(seed, tune_utterances);
  std::string nbest;
  for (const auto& l : tune.candidates) nbest += SerializeNBest(l);
  WriteFileAtomic(out_dir + "/tune.nbest", nbest);
  WriteFileAtomic(out_dir + "/tune_refs.txt", SerializeTranscripts(tune.refs));
  return kOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"latresc: lattice rescoring and system combination"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  app.add_option("-j,--jobs", jobs, "Worker threads for batch commands")
      ->envname("LATRESC_JOBS")
      ->check(CLI::PositiveNumber);

  // validate
  Inputs validate_in;
  auto* validate = app.add_subcommand("validate", "Check lattice files; lists violations");
  validate_in.Register(validate);

  // posteriors
  Inputs post_in;
  Scales post_scales;
  std::string post_out;
  auto* posteriors = app.add_subcommand("posteriors", "Add forward-backward arc posteriors");
  post_in.Register(posteriors);
  post_scales.Register(posteriors);
  posteriors->add_option("-o,--out", post_out, "Output directory")->required();

  // prune
  Inputs prune_in;
  Scales prune_scales;
  PruneOptions prune_opt;
  std::string prune_out;
  auto* prune = app.add_subcommand("prune", "Beam and density pruning");
  prune_in.Register(prune);
  prune_scales.Register(prune);
  prune->add_option("--beam", prune_opt.beam, "Log-score beam below the best path");
  prune->add_option("--max-density", prune_opt.max_density, "Maximum arcs per second");
  prune->add_option("-o,--out", prune_out, "Output directory")->required();

  // stats
  Inputs stats_in;
  auto* stats = app.add_subcommand("stats", "Per-file and mean lattice density");
  stats_in.Register(stats);

  // rescore-lattice
  Inputs rl_in;
  RescoreFlags rl;
  std::string rl_out;
  auto* rescore_lattice =
      app.add_subcommand("rescore-lattice", "Expand and rescore lattices with a scorer");
  rl_in.Register(rescore_lattice);
  rescore_lattice->add_option("--scorer", rl.scorer, "Scorer spec")
      ->envname("LATRESC_SCORER")
      ->required();
  rescore_lattice->add_option("--ngram", rl.config.ngram, "History clustering order")
      ->envname("LATRESC_NGRAM")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  rescore_lattice->add_option("--collar", rl.collar, "Cache collar in frames, or 'inf'")
      ->envname("LATRESC_COLLAR")
      ->capture_default_str();
  rescore_lattice->add_option("--stream", rl.config.stream_name, "Model score stream name")
      ->envname("LATRESC_STREAM")
      ->capture_default_str();
  rescore_lattice->add_flag("--no-eos", rl.no_eos, "Do not score the sentence end");
  rescore_lattice->add_flag("--stats", rl.show_stats, "Print expansion and cache counters");
  rescore_lattice->add_option("-o,--out", rl_out, "Output directory")->required();

  // nbest
  Inputs nb_in;
  std::string nb_out, nb_coeffs;
  int nb_n = 20;
  bool keep_duplicates = false;
  auto* nbest = app.add_subcommand("nbest", "Extract N-best lists from lattices");
  nb_in.Register(nbest);
  nbest->add_option("-n", nb_n, "List size")->check(CLI::PositiveNumber)->capture_default_str();
  nbest->add_option("--coeffs", nb_coeffs, "Coefficients: inline k=v,... or JSON file");
  nbest->add_flag("--keep-duplicates", keep_duplicates, "Keep paths with repeated word sequences");
  nbest->add_option("-o,--out", nb_out, "Output N-best file")->required();

  // rescore-nbest
  Inputs rn_in;
  std::string rn_out, rn_scorer, rn_stream = "lsync";
  bool rn_no_eos = false, rn_length_norm = false;
  auto* rescore_nbest = app.add_subcommand("rescore-nbest", "Score N-best hypotheses with a scorer");
  rn_in.Register(rescore_nbest);
  rescore_nbest->add_option("--scorer", rn_scorer, "Scorer spec")
      ->envname("LATRESC_SCORER")
      ->required();
  rescore_nbest->add_option("--stream", rn_stream, "Model score stream name")
      ->envname("LATRESC_STREAM")
      ->capture_default_str();
  rescore_nbest->add_flag("--no-eos", rn_no_eos, "Do not score the sentence end");
  rescore_nbest->add_flag("--length-normalize", rn_length_norm,
                          "Divide the stream score by the word count");
  rescore_nbest->add_option("-o,--out", rn_out, "Output N-best file")->required();

  // select
  Inputs sel_in;
  std::string sel_out, sel_coeffs;
  auto* select = app.add_subcommand("select", "1-best transcripts from lattices or N-best files");
  sel_in.Register(select);
  select->add_option("--coeffs", sel_coeffs, "Coefficients: inline k=v,... or JSON file");
  select->add_option("-o,--out", sel_out, "Output transcript file")->required();

  // tune
  Inputs tune_in;
  TuneFlags tf;
  auto* tune = app.add_subcommand("tune", "Tune combination coefficients with CMA-ES");
  tune_in.Register(tune);
  tune->add_option("--refs", tf.refs, "Reference transcripts")->required();
  tune->add_option("--init", tf.init, "Initial coefficients (default: first pass only)");
  tune->add_option("--budget", tf.options.budget, "Objective evaluations")->capture_default_str();
  tune->add_option("--population", tf.options.population, "CMA-ES population (0: default)");
  tune->add_option("--sigma0", tf.sigma0, "Initial step size");
  tune->add_option("--seed", tf.options.seed, "Random seed")
      ->envname("LATRESC_SEED")
      ->capture_default_str();
  tune->add_flag("--freeze-kappa", tf.options.freeze_kappa, "Keep kappa at its initial value");
  tune->add_option("-o,--out", tf.out, "Report JSON (default: stdout)");

  // score
  std::string ref_path, hyp_path, baseline_path;
  std::vector<int> buckets;
  auto* score = app.add_subcommand("score", "Word error rate, optionally by length bucket");
  score->add_option("--ref", ref_path, "Reference transcripts")->required();
  score->add_option("--hyp", hyp_path, "Hypothesis transcripts")->required();
  auto* baseline_opt = score->add_option("--baseline", baseline_path, "Baseline transcripts");
  score->add_option("--buckets", buckets, "Reference length edges, e.g. 5,10,15,20,30")
      ->delimiter(',')
      ->needs(baseline_opt);

  // train-ngram
  std::string lm_text, lm_out;
  NgramOptions lm_opt;
  auto* train = app.add_subcommand("train-ngram", "Train an n-gram scorer model");
  train->add_option("--text", lm_text, "One sentence per line")->required();
  train->add_option("--order", lm_opt.order, "Model order")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  train->add_option("--discount", lm_opt.discount, "Absolute discount")->capture_default_str();
  train->add_option("-o,--out", lm_out, "Model file")->required();

  // gen-fixtures
  std::string gen_out;
  uint64_t gen_seed = 1;
  int gen_utts = 20, gen_tune_utts = 40;
  auto* gen = app.add_subcommand("gen-fixtures", "Write a synthetic demo corpus");
  gen->add_option("-o,--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Random seed")->envname("LATRESC_SEED")->capture_default_str();
  gen->add_option("--utterances", gen_utts, "Demo lattices")->check(CLI::PositiveNumber);
  gen->add_option("--tune-utterances", gen_tune_utts, "Tuning N-best lists")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*validate) return CmdValidate(validate_in, jobs);
    if (*posteriors) return CmdPosteriors(post_in, post_out, post_scales, jobs);
    if (*prune) {
      prune_opt.scales = prune_scales.scales;
      return CmdPrune(prune_in, prune_out, prune_opt, jobs);
    }
    if (*stats) return CmdStats(stats_in, jobs);
    if (*rescore_lattice) return CmdRescoreLattice(rl_in, rl_out, rl, jobs);
    if (*nbest) return CmdNBest(nb_in, nb_out, nb_n, nb_coeffs, keep_duplicates, jobs);
    if (*rescore_nbest) {
      return CmdRescoreNBest(rn_in, rn_out, rn_scorer, rn_stream, rn_no_eos, rn_length_norm, jobs);
    }
    if (*select) return CmdSelect(sel_in, sel_out, sel_coeffs, jobs);
    if (*tune) {
      tf.options.jobs = jobs;
      return CmdTune(tune_in, tf);
    }
    if (*score) return CmdScore(ref_path, hyp_path, baseline_path, buckets);
    if (*train) return CmdTrainNgram(lm_text, lm_out, lm_opt);
    if (*gen) return CmdGenFixtures(gen_out, gen_seed, gen_utts, gen_tune_utts);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) std::cerr << v << "\n";
    return kDataError;
  } catch (const ScorerError& e) {
    std::cerr << "scorer failure: " << e.what() << "\n";
    return kScorerFailure;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace
}  // namespace latresc

int main(int argc, char** argv) { return latresc::Main(argc, argv); }
