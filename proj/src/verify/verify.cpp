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

#include "progeq/verify.hpp"

#include <sstream>

namespace progeq {

std::string VerifyResult::describe() const {
  switch (status) {
  case Status::Proven:
    return "Proven";
  case Status::Mismatch:
    return "Mismatch";
  case Status::FailedStep:
    return "FailedStep(" + std::to_string(failed_index + 1) + ", " +
           std::string(failure_name(reason)) + ")";
  }
  return "?";
}

VerifyResult verify(const Program &a, const Program &b,
                    std::span<const RewriteRule> seq, bool trace,
                    const Limits &limits) {
  VerifyResult result;
  Program cur = a;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    ApplyOutcome step = apply(seq[i], cur, limits);
    if (!step) {
      result.status = VerifyResult::Status::FailedStep;
      result.failed_index = i;
      result.reason = step.failure();
      return result;
    }
    cur = std::move(step).program();
    if (trace)
      result.intermediates.push_back(cur);
  }
  result.status = print_prefix(cur) == print_prefix(b)
                      ? VerifyResult::Status::Proven
                      : VerifyResult::Status::Mismatch;
  return result;
}

ProofFile parse_proof_file(const std::string &text, const Limits &limits) {
  ProofFile pf;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto toks = split_tokens(line);
    if (toks.empty() || toks[0].starts_with("#"))
      continue;
    if (toks[0] == "A:" || toks[0] == "B:") {
      std::size_t at = line.find(':');
      Program p = parse_prefix(std::string_view(line).substr(at + 1), limits);
      (toks[0] == "A:" ? pf.a : pf.b) = std::move(p);
      continue;
    }
    pf.rules.push_back(parse_rule(line));
  }
  return pf;
}

std::string format_proof_file(const Program &a, const Program &b,
                              std::span<const RewriteRule> rules) {
  std::string out = "A: " + print_prefix(a) + "\nB: " + print_prefix(b) + "\n";
  for (const RewriteRule &r : rules)
    out += print_rule(r) + "\n";
  return out;
}

} // namespace progeq
