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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "progeq/search.hpp"

namespace progeq {

// Wire records, one JSON object per line:
//   request  {"id": 7, "src": "<ProgCurrent> Y <ProgB>", "beam": 3}
//   response {"id": 7, "proposals": [{"rule": "stm1 Commute N", "score": -0.1}, ...]}
struct PolicyRequest {
  std::uint64_t id = 0;
  std::string src;
  int beam = 1;
};

struct PolicyResponse {
  std::uint64_t id = 0;
  std::vector<PolicyProposal> proposals; // descending score, at most beam
  std::vector<std::string> dropped;      // rule texts that did not parse
};

std::string encode_request(const PolicyRequest &req);
// Throws PolicyError when the line is not a response record. Unparseable
// rules are moved to `dropped`; the rest are sorted and cut to `beam`.
PolicyResponse decode_response(const std::string &line, int beam);

// A child process started with /bin/sh -c, its stdin and stdout joined to
// one end of a socket pair; stderr is inherited.
class ChildProcess {
public:
  explicit ChildProcess(const std::string &command);
  ~ChildProcess();
  ChildProcess(const ChildProcess &) = delete;
  ChildProcess &operator=(const ChildProcess &) = delete;

  // Writes the whole line plus '\n'. Returns false when the peer is gone.
  bool write_line(const std::string &line);
  // Blocks until a full line arrives; false at end of stream.
  bool read_line(std::string &line);
  // Stops the child and unblocks readers.
  void terminate();
  int pid() const { return pid_; }

private:
  int pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
};

// Shares one child between any number of threads. Requests get fresh ids;
// a reader thread routes responses back by id, so replies may arrive in any
// order. A request fails with PolicyError on timeout, malformed reply or
// child exit; other in-flight requests are unaffected unless the child is
// gone.
class PolicyGateway {
public:
  using Warn = std::function<void(const std::string &)>;

  explicit PolicyGateway(const std::string &command,
                         std::chrono::milliseconds timeout = std::chrono::seconds(30),
                         Warn warn = {});
  ~PolicyGateway();
  PolicyGateway(const PolicyGateway &) = delete;
  PolicyGateway &operator=(const PolicyGateway &) = delete;

  PolicyResponse request(const std::string &src, int beam);

  std::size_t dropped_proposals() const;

private:
  struct Slot {
    bool done = false;
    int beam = 1;
    PolicyResponse response;
    std::string error;
  };

  void reader_loop();
  void fail_all(const std::string &why);
  void warn(const std::string &msg);

  ChildProcess child_;
  std::chrono::milliseconds timeout_;
  Warn warn_;
  mutable std::mutex mu_;
  std::mutex write_mu_;
  std::condition_variable cv_;
  std::map<std::uint64_t, std::shared_ptr<Slot>> pending_;
  std::uint64_t next_id_ = 1;
  bool dead_ = false;
  std::string dead_reason_;
  std::size_t dropped_ = 0;
  std::thread reader_;
};

// Policy backed by a gateway; cheap to create per search.
class ExternalPolicy : public Policy {
public:
  explicit ExternalPolicy(std::shared_ptr<PolicyGateway> gateway)
      : gateway_(std::move(gateway)) {}
  std::vector<PolicyProposal> propose(const Program &current, const Program &target,
                                      int beam) override;

private:
  std::shared_ptr<PolicyGateway> gateway_;
};

} // namespace progeq
