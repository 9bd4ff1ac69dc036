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

#include "progeq/search.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "progeq/verify.hpp"

namespace progeq {

namespace {

// Closed token vocabulary: variables, operators/constants, then "(", "=",
// "===", ";". Closing parentheses are left out.
constexpr int kParen = kVocabVars + kNumOps;
constexpr int kAssign = kParen + 1;
constexpr int kOutAssign = kParen + 2;
constexpr int kSemi = kParen + 3;
using Histogram = std::array<int, kSemi + 1>;

void count_expr(const Expr &e, Histogram &h) {
  if (e.op == Op::Var) {
    ++h[e.var.dense()];
    return;
  }
  ++h[kVocabVars + static_cast<int>(e.op)];
  if (!e.args.empty())
    ++h[kParen];
  for (const Expr &a : e.args)
    count_expr(a, h);
}

Histogram histogram(const Program &p) {
  Histogram h{};
  for (const Stmt &s : p.stmts) {
    ++h[s.target.dense()];
    ++h[s.is_output ? kOutAssign : kAssign];
    count_expr(s.rhs, h);
    ++h[kSemi];
  }
  return h;
}

double histogram_distance(const Histogram &a, const Histogram &b) {
  long d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d += std::abs(a[i] - b[i]);
  return static_cast<double>(d);
}

struct Frontier {
  Program prog;
  std::vector<RewriteRule> history;
};

ProofResult found(const Program &a, const Program &b, std::vector<RewriteRule> seq,
                  std::size_t expanded, const Limits &limits,
                  std::vector<TraceStep> trace) {
  if (!verify(a, b, seq, false, limits).proven())
    throw std::logic_error("search produced a proof that does not verify");
  ProofResult r;
  r.status = ProofResult::Status::Found;
  r.proof = std::move(seq);
  r.states_expanded = expanded;
  r.trace = std::move(trace);
  return r;
}

} // namespace

double distance(const Program &p, const Program &q) {
  double stmts = std::abs(static_cast<double>(p.size()) - static_cast<double>(q.size()));
  return histogram_distance(histogram(p), histogram(q)) + stmts;
}

std::vector<PolicyProposal> HeuristicPolicy::propose(const Program &current,
                                                     const Program &target,
                                                     int beam) {
  Histogram goal = histogram(target);
  std::string goal_text = print_prefix(target);
  std::vector<PolicyProposal> out;
  for (auto &[rule, next] : enumerate_successors(current, limits_)) {
    double score;
    if (print_prefix(next) == goal_text) {
      score = 0.0;
    } else {
      double stmts = std::abs(static_cast<double>(next.size()) -
                              static_cast<double>(target.size()));
      score = -(histogram_distance(histogram(next), goal) + stmts + 1.0);
    }
    out.push_back({rule, score});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto &x, const auto &y) { return x.score > y.score; });
  if (out.size() > static_cast<std::size_t>(std::max(beam, 0)))
    out.resize(static_cast<std::size_t>(std::max(beam, 0)));
  return out;
}

ReplayPolicy::ReplayPolicy(const Program &a, std::vector<RewriteRule> seq,
                           const Limits &limits)
    : seq_(std::move(seq)) {
  Program cur = a;
  last_index_[print_prefix(cur)] = 0;
  for (std::size_t i = 0; i < seq_.size(); ++i) {
    ApplyOutcome next = apply(seq_[i], cur, limits);
    if (!next)
      break;
    cur = std::move(next).program();
    last_index_[print_prefix(cur)] = i + 1;
  }
}

std::vector<PolicyProposal> ReplayPolicy::propose(const Program &current,
                                                  const Program &, int beam) {
  auto it = last_index_.find(print_prefix(current));
  if (beam < 1 || it == last_index_.end() || it->second >= seq_.size())
    return {};
  return {{seq_[it->second], 0.0}};
}

std::string status_name(ProofResult::Status s) {
  switch (s) {
  case ProofResult::Status::Found:
    return "Found";
  case ProofResult::Status::Exhausted:
    return "Exhausted";
  case ProofResult::Status::StepLimit:
    return "StepLimit";
  }
  return "?";
}

std::optional<ProofResult::Status> status_from(const std::string &s) {
  for (auto st : {ProofResult::Status::Found, ProofResult::Status::Exhausted,
                  ProofResult::Status::StepLimit})
    if (status_name(st) == s)
      return st;
  return std::nullopt;
}

ProofResult prove(const Program &a, const Program &b, Policy &policy,
                  const SearchConfig &cfg) {
  if (cfg.beam < 1 || cfg.width < 1 || cfg.max_steps < 1)
    throw std::invalid_argument("search config requires B, I, Ns >= 1");
  const Limits limits = cfg.enforce_limits ? cfg.limits : Limits::unlimited();
  const std::string goal = print_prefix(b);
  if (print_prefix(a) == goal)
    return found(a, b, {}, 0, limits, {});

  std::unordered_set<std::string> seen{print_prefix(a)};
  std::vector<Frontier> frontier{{a, {}}};
  std::vector<TraceStep> trace;
  std::size_t expanded = 0;

  for (int step = 0; step < cfg.max_steps; ++step) {
    std::vector<std::vector<PolicyProposal>> proposals(frontier.size());
    std::size_t depth = 0;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      proposals[i] = policy.propose(frontier[i].prog, b, cfg.beam);
      ++expanded;
      std::stable_sort(proposals[i].begin(), proposals[i].end(),
                       [](const auto &x, const auto &y) { return x.score > y.score; });
      if (proposals[i].size() > static_cast<std::size_t>(cfg.beam))
        proposals[i].resize(static_cast<std::size_t>(cfg.beam));
      depth = std::max(depth, proposals[i].size());
    }

    std::vector<Frontier> next;
    for (std::size_t rank = 0; rank < depth; ++rank) {
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        if (rank >= proposals[i].size())
          continue;
        const RewriteRule &rule = proposals[i][rank].rule;
        ApplyOutcome out = apply(rule, frontier[i].prog, limits);
        if (!out)
          continue;
        std::string text = print_prefix(out.program());
        if (cfg.record_trace)
          trace.push_back({frontier[i].prog, rule, out.program()});
        if (text == goal) {
          std::vector<RewriteRule> seq = frontier[i].history;
          seq.push_back(rule);
          return found(a, b, std::move(seq), expanded, limits, std::move(trace));
        }
        if (seen.count(text) || next.size() >= static_cast<std::size_t>(cfg.width))
          continue;
        seen.insert(std::move(text));
        Frontier f{std::move(out).program(), frontier[i].history};
        f.history.push_back(rule);
        next.push_back(std::move(f));
      }
    }
    if (next.empty()) {
      ProofResult r;
      r.status = ProofResult::Status::Exhausted;
      r.states_expanded = expanded;
      r.trace = std::move(trace);
      return r;
    }
    frontier = std::move(next);
  }
  ProofResult r;
  r.status = ProofResult::Status::StepLimit;
  r.states_expanded = expanded;
  r.trace = std::move(trace);
  return r;
}

ProofResult exhaustive_prove(const Program &a, const Program &b, int max_depth,
                             std::size_t max_states, const Limits &limits) {
  const std::string goal = print_prefix(b);
  if (print_prefix(a) == goal)
    return found(a, b, {}, 0, limits, {});

  struct Node {
    Program prog;
    std::size_t parent;
    RewriteRule rule;
  };
  std::vector<Node> nodes{{a, 0, {}}};
  std::unordered_set<std::string> seen{print_prefix(a)};
  std::vector<std::size_t> layer{0};
  ProofResult r;

  auto path_to = [&](std::size_t idx) {
    std::vector<RewriteRule> seq;
    while (idx != 0) {
      seq.push_back(nodes[idx].rule);
      idx = nodes[idx].parent;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  for (int depth = 1; depth <= max_depth; ++depth) {
    bool last = depth == max_depth;
    std::vector<std::size_t> next;
    for (std::size_t idx : layer) {
      auto succs = enumerate_successors(nodes[idx].prog, limits);
      ++r.states_expanded;
      for (auto &[rule, prog] : succs) {
        std::string text = print_prefix(prog);
        if (text == goal) {
          auto seq = path_to(idx);
          seq.push_back(rule);
          return found(a, b, std::move(seq), r.states_expanded, limits, {});
        }
        if (last || !seen.insert(std::move(text)).second)
          continue;
        nodes.push_back({std::move(prog), idx, rule});
        next.push_back(nodes.size() - 1);
        if (seen.size() > max_states) {
          r.budget_exceeded = true;
          return r;
        }
      }
    }
    if (next.empty() && !last)
      return r;
    layer = std::move(next);
  }
  return r;
}

} // namespace progeq
