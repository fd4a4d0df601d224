// Copyright 2026 The cdakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CDA_BRIDGE_HPP
#define CDA_BRIDGE_HPP

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cda/bias.hpp"
#include "cda/error.hpp"
#include "json.hpp"

namespace cda {

struct BridgeConfig {
  // Program and arguments, passed to execvp.
  std::vector<std::string> command;
  std::chrono::milliseconds timeout{10000};
  // Grace period between SIGTERM and SIGKILL on shutdown.
  std::chrono::milliseconds kill_grace{2000};
};

/// Wire form of a request: {"id", "kind", "tokens", and either
/// "mention_a"/"mention_b" or "prefix_len"/"target"}.
inline nlohmann::json bridge_request_json(const ScoreRequest& req, std::uint64_t id) {
  nlohmann::json j;
  j["id"] = id;
  j["kind"] = std::string(to_string(req.kind));
  j["tokens"] = req.tokens;
  if (req.kind == ScoreKind::CorefPair) {
    j["mention_a"] = nlohmann::json::array({req.mention_a.start, req.mention_a.end});
    j["mention_b"] = nlohmann::json::array({req.mention_b.start, req.mention_b.end});
  } else {
    j["prefix_len"] = req.prefix_len;
    j["target"] = req.target;
  }
  return j;
}

/// Scorer backed by a child process speaking one JSON object per line over
/// its stdin/stdout. Strictly sequential: a request is written only after
/// the previous response was read. The child is spawned on first use and
/// torn down (SIGTERM, then SIGKILL after the grace period) on destruction
/// or after a Timeout/ProtocolError; the next request respawns it.
///
/// Not safe for concurrent use.
class BridgeScorer : public Scorer {
 public:
  explicit BridgeScorer(BridgeConfig config) : config_(std::move(config)) {
    if (config_.command.empty()) throw Error(ErrorCode::Usage, "bridge command is empty");
    if (config_.timeout.count() <= 0) throw Error(ErrorCode::Usage, "bridge timeout must be positive");
  }

  BridgeScorer(const BridgeScorer&) = delete;
  BridgeScorer& operator=(const BridgeScorer&) = delete;

  ~BridgeScorer() override { terminate(); }

  double score(const ScoreRequest& request) override {
    if (pid_ < 0) spawn();
    const std::uint64_t id = next_id_++;
    std::string line = bridge_request_json(request, id).dump() + "\n";
    try {
      write_all(line);
      const std::string reply = read_line();
      return parse_reply(reply, id);
    } catch (const ScorerError& e) {
      if (e.detail() != ErrorCode::ChildError) terminate();
      throw;
    }
  }

  bool running() const { return pid_ > 0; }
  pid_t pid() const { return pid_; }
  std::uint64_t requests_sent() const { return next_id_ - 1; }

 private:
  void spawn() {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
      throw ScorerError(ErrorCode::SpawnError, std::string("socketpair: ") + std::strerror(errno));
    }
    // Reports exec failure back to the parent; closed by a successful exec.
    int status_pipe[2];
    if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
      ::close(sv[0]);
      ::close(sv[1]);
      throw ScorerError(ErrorCode::SpawnError, std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> argv;
    for (auto& a : config_.command) argv.push_back(a.data());
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
      const int err = errno;
      ::close(sv[0]);
      ::close(sv[1]);
      ::close(status_pipe[0]);
      ::close(status_pipe[1]);
      throw ScorerError(ErrorCode::SpawnError, std::string("fork: ") + std::strerror(err));
    }
    if (pid == 0) {
      ::dup2(sv[1], STDIN_FILENO);
      ::dup2(sv[1], STDOUT_FILENO);
      ::execvp(argv[0], argv.data());
      const int err = errno;
      [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof err);
      ::_exit(127);
    }
    ::close(sv[1]);
    ::close(status_pipe[1]);
    int child_errno = 0;
    ssize_t n;
    do {
      n = ::read(status_pipe[0], &child_errno, sizeof child_errno);
    } while (n < 0 && errno == EINTR);
    ::close(status_pipe[0]);
    if (n > 0) {
      ::close(sv[0]);
      ::waitpid(pid, nullptr, 0);
      throw ScorerError(ErrorCode::SpawnError,
                        "cannot exec '" + config_.command[0] + "': " + std::strerror(child_errno));
    }
    pid_ = pid;
    fd_ = sv[0];
    buffer_.clear();
  }

  void terminate() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
    if (pid_ <= 0) return;
    ::kill(pid_, SIGTERM);
    const auto deadline = std::chrono::steady_clock::now() + config_.kill_grace;
    bool reaped = false;
    while (std::chrono::steady_clock::now() < deadline) {
      const pid_t r = ::waitpid(pid_, nullptr, WNOHANG);
      if (r == pid_ || (r < 0 && errno == ECHILD)) {
        reaped = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
    pid_ = -1;
    buffer_.clear();
  }

  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ScorerError(ErrorCode::ProtocolError,
                          std::string("writing to scorer child failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        throw ScorerError(ErrorCode::Timeout, "no reply from scorer child within " +
                                                  std::to_string(config_.timeout.count()) + " ms");
      }
      pollfd pfd{fd_, POLLIN, 0};
      const int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw ScorerError(ErrorCode::ProtocolError, std::string("poll: ") + std::strerror(errno));
      }
      if (r == 0) continue;
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw ScorerError(ErrorCode::ProtocolError, std::string("read: ") + std::strerror(errno));
      }
      if (n == 0) throw ScorerError(ErrorCode::ProtocolError, "scorer child closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  static double parse_reply(const std::string& line, std::uint64_t id) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ScorerError(ErrorCode::ProtocolError, "malformed reply '" + line + "'");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned()) {
      throw ScorerError(ErrorCode::ProtocolError, "reply without a numeric id: '" + line + "'");
    }
    if (j["id"].get<std::uint64_t>() != id) {
      throw ScorerError(ErrorCode::ProtocolError, "reply id " + j["id"].dump() + " does not match request " +
                                                      std::to_string(id));
    }
    if (j.contains("error")) {
      throw ScorerError(ErrorCode::ChildError,
                        j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump());
    }
    if (!j.contains("score") || !j["score"].is_number()) {
      throw ScorerError(ErrorCode::ProtocolError, "reply lacks a numeric score: '" + line + "'");
    }
    return j["score"].get<double>();
  }

  BridgeConfig config_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::uint64_t next_id_ = 1;
  std::string buffer_;
};

inline std::unique_ptr<BridgeScorer> bridge_scorer(BridgeConfig config) {
  return std::make_unique<BridgeScorer>(std::move(config));
}

}  // namespace cda

#endif  // CDA_BRIDGE_HPP
