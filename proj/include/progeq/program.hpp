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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "progeq/ast.hpp"

namespace progeq {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Model limits. The defaults are the standard profile; the generalization
// profile allows three outputs and up to 120 nodes.
struct Limits {
  int max_statements = 20;
  int max_nodes = 100;
  int max_scalar_vars = kMaxScalarVars;
  int max_depth = 6;
  int max_outputs = 2;

  static Limits standard() { return {}; }
  static Limits generalization() { return {20, 120, kMaxScalarVars, 6, 3}; }
  static Limits unlimited() { return {1 << 20, 1 << 20, kMaxScalarVars, 1 << 20, 1 << 20}; }
};

struct LimitReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

LimitReport check_limits(const Program &p, const Limits &limits = {});

// Structural well-formedness independent of size limits: operator typing,
// inputs never assigned, and every `===` statement being the final
// assignment of its target with no later reads. Returns the first problem.
std::optional<std::string> structural_error(const Program &p);

enum class Role { Input, Temp, Output };

class RoleMap {
public:
  bool contains(VarId v) const { return roles_[v.dense()].has_value(); }
  Role role(VarId v) const { return *roles_[v.dense()]; }
  void set(VarId v, Role r) { roles_[v.dense()] = r; }
  std::vector<VarId> vars_with(Role r) const;

private:
  std::array<std::optional<Role>, kVocabVars> roles_{};
};

RoleMap analyze_roles(const Program &p);

// Every variable token that appears anywhere in `p`, as a dense bitmap.
std::array<bool, kVocabVars> used_vars(const Program &p);

// Prefix token format. Statements end with ';' and tokens are separated by
// single spaces, e.g. "s01 === ( +s s02 s03 ) ;".
Program parse_prefix(std::string_view text, const Limits &limits = {});
Expr parse_expr(std::string_view text);
std::string print_prefix(const Program &p);
std::string print_expr(const Expr &e);
void append_expr_tokens(const Expr &e, std::vector<std::string> &out);
std::vector<std::string> program_tokens(const Program &p);

// "ProgA Y ProgB" on one line.
std::string print_pair(const Program &a, const Program &b);
std::pair<Program, Program> parse_pair(std::string_view text,
                                       const Limits &limits = {});

std::vector<std::string_view> split_tokens(std::string_view text);

} // namespace progeq
