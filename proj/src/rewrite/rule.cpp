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

#include "progeq/rule.hpp"

#include <charconv>

#include "progeq/program.hpp"

namespace progeq {

namespace {

constexpr std::array<std::string_view, kNumRules> kNames = {
    "AbsorbOp",        "AddZero",     "AssociativeLeft", "AssociativeRight",
    "Cancel",          "Commute",     "DeleteStm",       "DistributeLeft",
    "DistributeRight", "DivOne",      "DoubleOp",        "FactorLeft",
    "FactorRight",     "FlipLeft",    "FlipRight",       "Inline",
    "MultOne",         "NeutralOp",   "NewTmp",          "Rename",
    "SubZero",         "SwapPrev",    "UseVar",
};

constexpr std::array<RuleName, kNumRules> make_all() {
  std::array<RuleName, kNumRules> out{};
  for (int i = 0; i < kNumRules; ++i)
    out[i] = static_cast<RuleName>(i);
  return out;
}

constexpr std::array<RuleName, kNumRules> kAll = make_all();

} // namespace

std::string_view rule_name_str(RuleName r) {
  return kNames[static_cast<int>(r)];
}

std::optional<RuleName> rule_name_from(std::string_view s) {
  for (int i = 0; i < kNumRules; ++i)
    if (kNames[i] == s)
      return static_cast<RuleName>(i);
  return std::nullopt;
}

Operands rule_operands(RuleName r) {
  switch (r) {
  case RuleName::SwapPrev:
  case RuleName::DeleteStm:
    return Operands::None;
  case RuleName::UseVar:
  case RuleName::Inline:
  case RuleName::Rename:
    return Operands::Var;
  case RuleName::NewTmp:
    return Operands::NodeVar;
  default:
    return Operands::Node;
  }
}

bool is_statement_rule(RuleName r) {
  switch (r) {
  case RuleName::SwapPrev:
  case RuleName::UseVar:
  case RuleName::Inline:
  case RuleName::NewTmp:
  case RuleName::DeleteStm:
  case RuleName::Rename:
    return true;
  default:
    return false;
  }
}

const std::array<RuleName, kNumRules> &all_rules() { return kAll; }

bool RewriteRule::well_formed() const {
  if (stm < 1)
    return false;
  switch (rule_operands(name)) {
  case Operands::None:
    return !path && !var;
  case Operands::Var:
    return !path && var;
  case Operands::Node:
    return path && !var;
  case Operands::NodeVar:
    return path && var;
  }
  return false;
}

std::strong_ordering operator<=>(const RewriteRule &a, const RewriteRule &b) {
  if (auto c = a.stm <=> b.stm; c != 0)
    return c;
  if (auto c = a.name <=> b.name; c != 0)
    return c;
  if (auto c = a.path <=> b.path; c != 0)
    return c;
  return a.var <=> b.var;
}

std::vector<std::string> rule_tokens(const RewriteRule &r) {
  std::vector<std::string> out;
  out.push_back("stm" + std::to_string(r.stm));
  out.emplace_back(rule_name_str(r.name));
  if (r.path)
    out.push_back(r.path->str());
  if (r.var)
    out.push_back(r.var->str());
  return out;
}

std::string print_rule(const RewriteRule &r) {
  std::string out;
  for (const std::string &t : rule_tokens(r)) {
    if (!out.empty())
      out += ' ';
    out += t;
  }
  return out;
}

RewriteRule parse_rule(std::string_view text) {
  auto toks = split_tokens(text);
  if (toks.size() < 2 || toks.size() > 4)
    throw ParseError("rule must have 2 to 4 tokens: '" + std::string(text) + "'");
  RewriteRule r;
  std::string_view stm = toks[0];
  int n = 0;
  if (stm.size() < 4 || stm.substr(0, 3) != "stm" ||
      std::from_chars(stm.data() + 3, stm.data() + stm.size(), n).ptr !=
          stm.data() + stm.size() ||
      n < 1 || stm[3] == '0')
    throw ParseError("bad statement token '" + std::string(stm) + "'");
  r.stm = n;
  auto name = rule_name_from(toks[1]);
  if (!name)
    throw ParseError("unknown rule name '" + std::string(toks[1]) + "'");
  r.name = *name;
  std::size_t i = 2;
  Operands ops = rule_operands(r.name);
  if (ops == Operands::Node || ops == Operands::NodeVar) {
    if (i >= toks.size())
      throw ParseError(std::string(toks[1]) + " requires a NodeID");
    r.path = NodePath::parse(toks[i]);
    if (!r.path)
      throw ParseError("bad NodeID '" + std::string(toks[i]) + "'");
    ++i;
  }
  if (ops == Operands::Var || ops == Operands::NodeVar) {
    if (i >= toks.size())
      throw ParseError(std::string(toks[1]) + " requires a VarID");
    r.var = VarId::parse(toks[i]);
    if (!r.var)
      throw ParseError("bad VarID '" + std::string(toks[i]) + "'");
    ++i;
  }
  if (i != toks.size())
    throw ParseError("too many operands for " + std::string(toks[1]));
  return r;
}

} // namespace progeq
