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
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "progeq/program.hpp"
#include "progeq/rule.hpp"

namespace progeq {

enum class Failure {
  IllegalPattern,
  TypeMismatch,
  DependenceViolation,
  LimitExceeded,
  BadAddress,
  VarConflict,
};

std::string_view failure_name(Failure f);

class ApplyOutcome {
public:
  ApplyOutcome(Program p) : v_(std::move(p)) {}
  ApplyOutcome(Failure f) : v_(f) {}

  bool ok() const { return std::holds_alternative<Program>(v_); }
  explicit operator bool() const { return ok(); }
  const Program &program() const & { return std::get<Program>(v_); }
  Program &&program() && { return std::get<Program>(std::move(v_)); }
  Failure failure() const { return std::get<Failure>(v_); }

private:
  std::variant<Program, Failure> v_;
};

// Applies one rewrite rule. Pure: the input program is never modified. On
// success the result is structurally well formed and within `limits`.
ApplyOutcome apply(const RewriteRule &rule, const Program &p,
                   const Limits &limits = {});

// Every rule that applies successfully to `p`, ordered by
// (statement, rule name, node path, variable).
std::vector<RewriteRule> enumerate_legal(const Program &p,
                                         const Limits &limits = {});

// Same enumeration, keeping the rewritten programs.
std::vector<std::pair<RewriteRule, Program>>
enumerate_successors(const Program &p, const Limits &limits = {});

} // namespace progeq
