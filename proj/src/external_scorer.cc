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

#include "latresc/external_scorer.h"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <fmt/format.h>

#include "json.hpp"
#include "latresc/errors.h"
#include "latresc/lattice.h"

namespace latresc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct ExternalState {
  std::string utterance_id;
  std::vector<std::string> history;
  int64_t duration_frames = 0;
};

}  // namespace

ExternalScorer::ExternalScorer(const std::string& command) : command_(command) {
  int in_pair[2];   // parent writes [0], child reads [1] as stdin
  int out_pair[2];  // child writes [1] as stdout, parent reads [0]
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0 ||
      socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
    throw ScorerError(fmt::format("socketpair failed: {}", std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) throw ScorerError(fmt::format("fork failed: {}", std::strerror(errno)));
  if (pid == 0) {
    dup2(in_pair[1], STDIN_FILENO);
    dup2(out_pair[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pair[1]);
  close(out_pair[1]);
  pid_ = pid;
  to_child_ = in_pair[0];
  from_child_ = out_pair[0];

  const std::string reply = Exchange(R"({"op":"hello"})");
  try {
    const json j = json::parse(reply);
    name_ = j.at("name").get<std::string>();
    time_sensitive_ = j.at("time_sensitive").get<bool>();
  } catch (const json::exception& e) {
    throw ScorerError(fmt::format("external scorer '{}': bad hello reply '{}': {}", command_,
                                  reply, e.what()));
  }
}

ExternalScorer::~ExternalScorer() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

std::string ExternalScorer::Exchange(const std::string& request_line) const {
  std::lock_guard<std::mutex> lock(mu_);
  const std::string line = request_line + "\n";
  size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = send(to_child_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(fmt::format("external scorer '{}': write failed: {}", command_,
                                    std::strerror(errno)));
    }
    sent += static_cast<size_t>(n);
  }
  while (true) {
    const auto nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      return reply;
    }
    char buf[4096];
    const ssize_t n = read(from_child_, buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      throw ScorerError(fmt::format("external scorer '{}' closed its output", command_));
    }
    read_buffer_.append(buf, static_cast<size_t>(n));
  }
}

double ExternalScorer::RequestLogprob(const std::string& request_line) const {
  const std::string reply = Exchange(request_line);
  try {
    const json j = json::parse(reply);
    const json& value = j.at("logprob");
    if (!value.is_number()) throw ScorerError("logprob is not a number");
    return value.get<double>();
  } catch (const json::exception& e) {
    throw ScorerError(fmt::format("external scorer '{}': malformed reply '{}': {}", command_,
                                  reply, e.what()));
  } catch (const ScorerError& e) {
    throw ScorerError(fmt::format("external scorer '{}': malformed reply '{}': {}", command_,
                                  reply, e.what()));
  }
}

ScorerState ExternalScorer::BeginUtterance(std::string_view utterance_id,
                                           int64_t duration_frames) const {
  return ScorerState::Make(ExternalState{std::string(utterance_id), {}, duration_frames});
}

StepResult ExternalScorer::ScoreWord(const ScorerState& state, std::string_view word,
                                     int64_t node_time) const {
  const auto& s = state.Get<ExternalState>();
  ordered_json request = {{"op", "score"},
                          {"utt", s.utterance_id},
                          {"history", s.history},
                          {"word", word},
                          {"time", node_time}};
  const double logprob = RequestLogprob(request.dump());
  ExternalState next = s;
  next.history.emplace_back(word);
  return {ScorerState::Make(std::move(next)), logprob};
}

double ExternalScorer::Finish(const ScorerState& state) const {
  const auto& s = state.Get<ExternalState>();
  ordered_json request = {{"op", "score"},
                          {"utt", s.utterance_id},
                          {"history", s.history},
                          {"word", kSentenceEnd},
                          {"time", s.duration_frames}};
  return RequestLogprob(request.dump());
}

double ExternalScorer::ScoreSequence(std::string_view utterance_id,
                                     std::span<const std::string> words,
                                     std::span<const int64_t> times, bool with_eos) const {
  if (!times.empty() || !with_eos) {
    return Scorer::ScoreSequence(utterance_id, words, times, with_eos);
  }
  ordered_json request = {{"op", "sequence"},
                          {"utt", utterance_id},
                          {"words", std::vector<std::string>(words.begin(), words.end())}};
  return RequestLogprob(request.dump());
}

}  // namespace latresc
