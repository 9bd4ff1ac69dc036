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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "progeq/ast.hpp"

namespace progeq {

// The 23 rewrite rules, in alphabetical order (enumeration order relies on
// this).
enum class RuleName : std::uint8_t {
  AbsorbOp,
  AddZero,
  AssociativeLeft,
  AssociativeRight,
  Cancel,
  Commute,
  DeleteStm,
  DistributeLeft,
  DistributeRight,
  DivOne,
  DoubleOp,
  FactorLeft,
  FactorRight,
  FlipLeft,
  FlipRight,
  Inline,
  MultOne,
  NeutralOp,
  NewTmp,
  Rename,
  SubZero,
  SwapPrev,
  UseVar,
};

inline constexpr int kNumRules = static_cast<int>(RuleName::UseVar) + 1;

// Which operands a rule takes, per the `stm# Name [NodeID] [VarID]` syntax.
enum class Operands { None, Var, Node, NodeVar };

std::string_view rule_name_str(RuleName r);
std::optional<RuleName> rule_name_from(std::string_view s);
Operands rule_operands(RuleName r);
// SwapPrev, UseVar, Inline, NewTmp, DeleteStm and Rename.
bool is_statement_rule(RuleName r);
const std::array<RuleName, kNumRules> &all_rules();

struct RewriteRule {
  int stm = 1; // 1-based statement index
  RuleName name = RuleName::Commute;
  std::optional<NodePath> path;
  std::optional<VarId> var;

  bool well_formed() const;

  friend bool operator==(const RewriteRule &, const RewriteRule &) = default;
  friend std::strong_ordering operator<=>(const RewriteRule &a,
                                          const RewriteRule &b);
};

// Text form: "stm2 NewTmp Nlr s05".
std::string print_rule(const RewriteRule &r);
RewriteRule parse_rule(std::string_view text);
std::vector<std::string> rule_tokens(const RewriteRule &r);

} // namespace progeq
