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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "progeq/rewrite.hpp"

namespace progeq {

struct VerifyResult {
  enum class Status { Proven, FailedStep, Mismatch };

  Status status = Status::Mismatch;
  // For FailedStep: 0-based index into the sequence and the reason.
  std::size_t failed_index = 0;
  Failure reason = Failure::IllegalPattern;
  // Programs after each successful step (only when tracing was requested).
  std::vector<Program> intermediates;

  bool proven() const { return status == Status::Proven; }
  std::string describe() const;
};

// Folds apply() over `seq` starting from `a` and checks that the final
// program prints exactly like `b`. Stops at the first illegal step.
VerifyResult verify(const Program &a, const Program &b,
                    std::span<const RewriteRule> seq, bool trace = false,
                    const Limits &limits = {});

// Proof file: "A: <tokens>", "B: <tokens>", then one rule per line.
struct ProofFile {
  std::optional<Program> a;
  std::optional<Program> b;
  std::vector<RewriteRule> rules;
};

ProofFile parse_proof_file(const std::string &text, const Limits &limits = {});
std::string format_proof_file(const Program &a, const Program &b,
                              std::span<const RewriteRule> rules);

} // namespace progeq
