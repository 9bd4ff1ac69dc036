// Copyright 2026 The progeq Authors. All rights reserved.
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

#include "progeq/policy_bridge.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <iostream>

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace progeq {

using Json = nlohmann::json;

std::string encode_request(const PolicyRequest &req) {
  return Json{{"id", req.id}, {"src", req.src}, {"beam", req.beam}}.dump();
}

PolicyResponse decode_response(const std::string &line, int beam) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::exception &e) {
    throw PolicyError(std::string("malformed policy record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned())
    throw PolicyError("policy record without an id");
  PolicyResponse r;
  r.id = j["id"].get<std::uint64_t>();
  if (!j.contains("proposals") || !j["proposals"].is_array())
    throw PolicyError("policy record " + std::to_string(r.id) + " without proposals");
  for (const Json &p : j["proposals"]) {
    if (!p.is_object() || !p.contains("rule") || !p["rule"].is_string()) {
      r.dropped.push_back(p.dump());
      continue;
    }
    std::string text = p["rule"].get<std::string>();
    double score = 0.0;
    if (p.contains("score")) {
      if (!p["score"].is_number()) {
        r.dropped.push_back(text);
        continue;
      }
      score = p["score"].get<double>();
    }
    try {
      r.proposals.push_back({parse_rule(text), score});
    } catch (const std::exception &) {
      r.dropped.push_back(text);
    }
  }
  std::stable_sort(r.proposals.begin(), r.proposals.end(),
                   [](const PolicyProposal &a, const PolicyProposal &b) {
                     return a.score > b.score;
                   });
  if (static_cast<int>(r.proposals.size()) > beam)
    r.proposals.resize(std::max(beam, 0));
  return r;
}

ChildProcess::ChildProcess(const std::string &command) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
    throw PolicyError(std::string("socketpair: ") + std::strerror(errno));
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw PolicyError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    _exit(127);
  }
  ::close(sv[1]);
  pid_ = pid;
  fd_ = sv[0];
}

ChildProcess::~ChildProcess() {
  terminate();
  if (fd_ >= 0)
    ::close(fd_);
  if (pid_ > 0)
    ::waitpid(pid_, nullptr, 0);
}

void ChildProcess::terminate() {
  if (fd_ >= 0)
    ::shutdown(fd_, SHUT_RDWR);
  if (pid_ > 0)
    ::kill(-pid_, SIGTERM);
}

bool ChildProcess::write_line(const std::string &line) {
  std::string data = line + '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

bool ChildProcess::read_line(std::string &line) {
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return true;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR)
      continue;
    if (n <= 0)
      return false;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

PolicyGateway::PolicyGateway(const std::string &command, std::chrono::milliseconds timeout,
                             Warn warn)
    : child_(command), timeout_(timeout), warn_(std::move(warn)) {
  reader_ = std::thread([this] { reader_loop(); });
}

PolicyGateway::~PolicyGateway() {
  child_.terminate();
  if (reader_.joinable())
    reader_.join();
}

void PolicyGateway::warn(const std::string &msg) {
  if (warn_)
    warn_(msg);
  else
    std::cerr << "warning: " << msg << '\n';
}

void PolicyGateway::fail_all(const std::string &why) {
  std::lock_guard lock(mu_);
  dead_ = true;
  dead_reason_ = why;
  for (auto &[id, slot] : pending_) {
    slot->done = true;
    slot->error = why;
  }
  pending_.clear();
  cv_.notify_all();
}

void PolicyGateway::reader_loop() {
  std::string line;
  while (child_.read_line(line)) {
    if (line.empty())
      continue;
    PolicyResponse resp;
    try {
      // Beam is per request; decode untruncated here and cut below.
      resp = decode_response(line, 1 << 30);
    } catch (const PolicyError &e) {
      // Without a usable id the record can only be blamed on a request
      // when exactly one is outstanding.
      std::unique_lock lock(mu_);
      if (pending_.size() == 1) {
        auto slot = pending_.begin()->second;
        pending_.clear();
        slot->done = true;
        slot->error = e.what();
        cv_.notify_all();
      } else {
        lock.unlock();
        warn(std::string(e.what()) + "; ignored");
      }
      continue;
    }
    for (const std::string &d : resp.dropped)
      warn("dropped unparseable proposal: " + d);
    std::unique_lock lock(mu_);
    dropped_ += resp.dropped.size();
    auto it = pending_.find(resp.id);
    if (it == pending_.end()) {
      lock.unlock();
      warn("policy response for unknown id " + std::to_string(resp.id));
      continue;
    }
    auto slot = it->second;
    pending_.erase(it);
    if (static_cast<int>(resp.proposals.size()) > slot->beam)
      resp.proposals.resize(slot->beam);
    slot->response = std::move(resp);
    slot->done = true;
    cv_.notify_all();
  }
  fail_all("policy process exited");
}

PolicyResponse PolicyGateway::request(const std::string &src, int beam) {
  auto slot = std::make_shared<Slot>();
  slot->beam = beam;
  PolicyRequest req;
  {
    std::lock_guard lock(mu_);
    if (dead_)
      throw PolicyError(dead_reason_);
    req = {next_id_++, src, beam};
    pending_[req.id] = slot;
  }
  bool written;
  {
    std::lock_guard lock(write_mu_);
    written = child_.write_line(encode_request(req));
  }
  std::unique_lock lock(mu_);
  if (!written) {
    pending_.erase(req.id);
    throw PolicyError("cannot write to policy process");
  }
  if (!cv_.wait_for(lock, timeout_, [&] { return slot->done; })) {
    pending_.erase(req.id);
    throw PolicyError("policy request " + std::to_string(req.id) + " timed out after " +
                      std::to_string(timeout_.count()) + " ms");
  }
  if (!slot->error.empty())
    throw PolicyError(slot->error);
  return std::move(slot->response);
}

std::size_t PolicyGateway::dropped_proposals() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

std::vector<PolicyProposal> ExternalPolicy::propose(const Program &current,
                                                    const Program &target, int beam) {
  return gateway_->request(print_pair(current, target), beam).proposals;
}

} // namespace progeq
