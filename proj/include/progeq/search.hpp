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

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "progeq/rewrite.hpp"

namespace progeq {

struct PolicyProposal {
  RewriteRule rule;
  double score = 0.0; // higher is preferred
};

// Raised by policies that talk to another process when the transport fails.
// Searches let it propagate; no proof is ever fabricated from a failure.
class PolicyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Proposes up to `beam` rewrites for `current`, best first, given the goal
// program. Implementations must be safe to call concurrently on distinct
// instances.
class Policy {
public:
  virtual ~Policy() = default;
  virtual std::vector<PolicyProposal>
  propose(const Program &current, const Program &target, int beam) = 0;
};

// Token-multiset distance: size of the multiset symmetric difference of the
// two token streams, closing parentheses excluded (they are implied by
// operator arity), plus the difference in statement counts. Zero does not
// imply identity.
double distance(const Program &p, const Program &q);

// Scores every legal rewrite by the distance of its result to the target.
// An exact match scores 0, anything else -(distance + 1); ties keep
// enumeration order.
class HeuristicPolicy : public Policy {
public:
  explicit HeuristicPolicy(Limits limits = {}) : limits_(limits) {}
  std::vector<PolicyProposal> propose(const Program &current,
                                      const Program &target, int beam) override;

private:
  Limits limits_;
};

// Replays a known rewrite sequence. From any program on the recorded
// trajectory it proposes the step following the program's last occurrence,
// so loops in the sequence are skipped.
class ReplayPolicy : public Policy {
public:
  ReplayPolicy(const Program &a, std::vector<RewriteRule> seq,
               const Limits &limits = {});
  std::vector<PolicyProposal> propose(const Program &current,
                                      const Program &target, int beam) override;

private:
  std::vector<RewriteRule> seq_;
  std::unordered_map<std::string, std::size_t> last_index_;
};

struct SearchConfig {
  int beam = 3;        // proposals requested per intermediate (B)
  int width = 2;       // intermediates kept per step (I)
  int max_steps = 25;  // step limit (Ns)
  bool enforce_limits = true;
  Limits limits{};
  bool record_trace = false;
};

struct TraceStep {
  Program before;
  RewriteRule rule;
  Program after;
};

struct ProofResult {
  enum class Status { Found, Exhausted, StepLimit };

  Status status = Status::Exhausted;
  std::vector<RewriteRule> proof;
  std::size_t states_expanded = 0;
  bool budget_exceeded = false;
  // Every legal rewrite observed during the search (when requested).
  std::vector<TraceStep> trace;

  bool found() const { return status == Status::Found; }
  std::optional<std::size_t> proof_length() const {
    return found() ? std::optional<std::size_t>(proof.size()) : std::nullopt;
  }
};

std::string status_name(ProofResult::Status s);
std::optional<ProofResult::Status> status_from(const std::string &s);

// Beam proof search. Each step queries the policy for every kept
// intermediate, drops illegal and already-seen results, checks every legal
// result against the goal, and keeps up to `width` new intermediates taking
// the best-ranked usable proposal of each intermediate first, then the
// second-ranked, and so on. Found proofs are re-verified before returning.
ProofResult prove(const Program &a, const Program &b, Policy &policy,
                  const SearchConfig &cfg);

// Breadth-first search over every legal rewrite; finds a proof iff one of
// length <= max_depth exists (unless the state budget runs out).
ProofResult exhaustive_prove(const Program &a, const Program &b, int max_depth,
                             std::size_t max_states = 2'000'000,
                             const Limits &limits = {});

} // namespace progeq
