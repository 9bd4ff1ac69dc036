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

#include "progeq/program.hpp"

#include <algorithm>

namespace progeq {

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i > start)
      out.push_back(text.substr(start, i - start));
  }
  return out;
}

namespace {

class PrefixParser {
public:
  explicit PrefixParser(std::span<const std::string_view> toks) : toks_(toks) {}

  bool done() const { return pos_ >= toks_.size(); }

  std::string_view next(const char *what) {
    if (done())
      throw ParseError(std::string("unexpected end of input, expected ") + what);
    return toks_[pos_++];
  }

  Expr expr() {
    std::string_view t = next("expression");
    if (t == "(") {
      std::string_view optok = next("operator");
      auto op = op_from_token(optok);
      if (!op || is_constant(*op))
        throw ParseError("unknown operator '" + std::string(optok) + "'");
      const OpInfo &info = op_info(*op);
      Expr e{*op, {}, {}};
      for (int i = 0; i < info.arity; ++i) {
        if (!done() && toks_[pos_] == ")")
          throw ParseError("too few operands for '" + std::string(optok) + "'");
        e.args.push_back(expr());
        if (e.args.back().type() != info.args[i])
          throw ParseError("type mismatch in operand " + std::to_string(i + 1) +
                           " of '" + std::string(optok) + "'");
      }
      std::string_view close = next("')'");
      if (close != ")")
        throw ParseError("unbalanced parentheses near '" + std::string(close) +
                         "'");
      return e;
    }
    if (t == ")" || t == ";")
      throw ParseError("unbalanced parentheses near '" + std::string(t) + "'");
    if (auto v = VarId::parse(t))
      return Expr::variable(*v);
    if (auto op = op_from_token(t); op && is_constant(*op))
      return Expr::constant(*op);
    throw ParseError("unknown token '" + std::string(t) + "'");
  }

  Stmt stmt() {
    std::string_view t = next("statement target");
    auto target = VarId::parse(t);
    if (!target)
      throw ParseError("statement target must be a variable, got '" +
                       std::string(t) + "'");
    std::string_view assign = next("'=' or '==='");
    if (assign != "=" && assign != "===")
      throw ParseError("expected '=' or '===', got '" + std::string(assign) + "'");
    Stmt s{*target, assign == "===", expr()};
    std::string_view end = next("';'");
    if (end != ";")
      throw ParseError(end == ")" ? "unbalanced parentheses"
                                  : "expected ';', got '" + std::string(end) + "'");
    if (s.rhs.type() != s.target.type)
      throw ParseError("type mismatch: " + std::string(type_name(s.rhs.type())) +
                       " expression assigned to " + s.target.str());
    return s;
  }

private:
  std::span<const std::string_view> toks_;
  std::size_t pos_ = 0;
};

void append_tokens(const Expr &e, std::string &out) {
  if (e.op == Op::Var) {
    out += e.var.str();
    return;
  }
  if (e.args.empty()) {
    out += op_info(e.op).token;
    return;
  }
  out += "( ";
  out += op_info(e.op).token;
  for (const Expr &a : e.args) {
    out += ' ';
    append_tokens(a, out);
  }
  out += " )";
}

std::optional<std::string> type_error(const Expr &e) {
  if (e.op == Op::Var || is_constant(e.op)) {
    if (!e.args.empty())
      return "leaf with operands";
    return std::nullopt;
  }
  const OpInfo &info = op_info(e.op);
  if (static_cast<int>(e.args.size()) != info.arity)
    return "wrong arity for '" + std::string(info.token) + "'";
  for (int i = 0; i < info.arity; ++i) {
    if (e.args[i].type() != info.args[i])
      return "type mismatch under '" + std::string(info.token) + "'";
    if (auto err = type_error(e.args[i]))
      return err;
  }
  return std::nullopt;
}

} // namespace

Program parse_prefix(std::string_view text, const Limits &limits) {
  auto toks = split_tokens(text);
  if (toks.empty())
    throw ParseError("empty program");
  PrefixParser parser(toks);
  Program p;
  while (!parser.done())
    p.stmts.push_back(parser.stmt());
  if (auto err = structural_error(p))
    throw ParseError(*err);
  LimitReport report = check_limits(p, limits);
  if (!report.ok())
    throw ParseError("limit violation: " + report.violations.front());
  return p;
}

Expr parse_expr(std::string_view text) {
  auto toks = split_tokens(text);
  PrefixParser parser(toks);
  Expr e = parser.expr();
  if (!parser.done())
    throw ParseError("trailing tokens after expression");
  return e;
}

std::string print_expr(const Expr &e) {
  std::string out;
  append_tokens(e, out);
  return out;
}

std::string print_prefix(const Program &p) {
  std::string out;
  out.reserve(p.stmts.size() * 48);
  for (const Stmt &s : p.stmts) {
    if (!out.empty())
      out += ' ';
    out += s.target.str();
    out += s.is_output ? " === " : " = ";
    append_tokens(s.rhs, out);
    out += " ;";
  }
  return out;
}

void append_expr_tokens(const Expr &e, std::vector<std::string> &out) {
  if (e.op == Op::Var) {
    out.push_back(e.var.str());
    return;
  }
  if (e.args.empty()) {
    out.emplace_back(op_info(e.op).token);
    return;
  }
  out.emplace_back("(");
  out.emplace_back(op_info(e.op).token);
  for (const Expr &a : e.args)
    append_expr_tokens(a, out);
  out.emplace_back(")");
}

std::vector<std::string> program_tokens(const Program &p) {
  std::vector<std::string> out;
  for (const Stmt &s : p.stmts) {
    out.push_back(s.target.str());
    out.emplace_back(s.is_output ? "===" : "=");
    append_expr_tokens(s.rhs, out);
    out.emplace_back(";");
  }
  return out;
}

std::string print_pair(const Program &a, const Program &b) {
  return print_prefix(a) + " Y " + print_prefix(b);
}

std::pair<Program, Program> parse_pair(std::string_view text,
                                       const Limits &limits) {
  auto toks = split_tokens(text);
  auto it = std::find(toks.begin(), toks.end(), std::string_view("Y"));
  if (it == toks.end() || std::find(it + 1, toks.end(), "Y") != toks.end())
    throw ParseError("pair must contain exactly one 'Y' separator");
  std::size_t lhs_end = toks[it - toks.begin()].data() - text.data();
  std::size_t rhs_begin = lhs_end + 1;
  return {parse_prefix(text.substr(0, lhs_end), limits),
          parse_prefix(text.substr(rhs_begin), limits)};
}

std::optional<std::string> structural_error(const Program &p) {
  std::array<bool, kVocabVars> written{};
  std::array<bool, kVocabVars> input{};
  for (std::size_t k = 0; k < p.stmts.size(); ++k) {
    const Stmt &s = p.stmts[k];
    if (auto err = type_error(s.rhs))
      return "stm" + std::to_string(k + 1) + ": " + *err;
    if (s.rhs.type() != s.target.type)
      return "stm" + std::to_string(k + 1) + ": type mismatch on assignment";
    std::vector<VarId> reads;
    collect_vars(s.rhs, reads);
    for (VarId v : reads)
      if (!written[v.dense()])
        input[v.dense()] = true;
    if (input[s.target.dense()])
      return "stm" + std::to_string(k + 1) + ": input variable " +
             s.target.str() + " is assigned";
    written[s.target.dense()] = true;
  }
  for (std::size_t k = 0; k < p.stmts.size(); ++k) {
    const Stmt &s = p.stmts[k];
    if (!s.is_output)
      continue;
    for (std::size_t m = k + 1; m < p.stmts.size(); ++m) {
      if (p.stmts[m].target == s.target)
        return "output " + s.target.str() + " reassigned after stm" +
               std::to_string(k + 1);
      if (reads_var(p.stmts[m].rhs, s.target))
        return "output " + s.target.str() + " read after stm" +
               std::to_string(k + 1);
    }
  }
  return std::nullopt;
}

LimitReport check_limits(const Program &p, const Limits &limits) {
  LimitReport r;
  if (static_cast<int>(p.stmts.size()) > limits.max_statements)
    r.violations.push_back("statements " + std::to_string(p.stmts.size()) +
                           " > " + std::to_string(limits.max_statements));
  int nodes = p.node_count();
  if (nodes > limits.max_nodes)
    r.violations.push_back("nodes " + std::to_string(nodes) + " > " +
                           std::to_string(limits.max_nodes));
  auto used = used_vars(p);
  int scalars = static_cast<int>(
      std::count(used.begin(), used.begin() + kMaxScalarVars, true));
  if (scalars > limits.max_scalar_vars)
    r.violations.push_back("scalar variables " + std::to_string(scalars) +
                           " > " + std::to_string(limits.max_scalar_vars));
  int depth = p.max_depth();
  if (depth > limits.max_depth)
    r.violations.push_back("expression depth " + std::to_string(depth) + " > " +
                           std::to_string(limits.max_depth));
  int outputs = p.output_count();
  if (outputs > limits.max_outputs)
    r.violations.push_back("outputs " + std::to_string(outputs) + " > " +
                           std::to_string(limits.max_outputs));
  return r;
}

std::array<bool, kVocabVars> used_vars(const Program &p) {
  std::array<bool, kVocabVars> used{};
  std::vector<VarId> vars;
  for (const Stmt &s : p.stmts) {
    used[s.target.dense()] = true;
    vars.clear();
    collect_vars(s.rhs, vars);
    for (VarId v : vars)
      used[v.dense()] = true;
  }
  return used;
}

RoleMap analyze_roles(const Program &p) {
  RoleMap roles;
  std::array<bool, kVocabVars> written{};
  std::vector<VarId> reads;
  for (const Stmt &s : p.stmts) {
    reads.clear();
    collect_vars(s.rhs, reads);
    for (VarId v : reads)
      if (!written[v.dense()] && !roles.contains(v))
        roles.set(v, Role::Input);
    written[s.target.dense()] = true;
  }
  for (const Stmt &s : p.stmts) {
    if (roles.contains(s.target) && roles.role(s.target) == Role::Input)
      continue;
    if (s.is_output)
      roles.set(s.target, Role::Output);
    else if (!roles.contains(s.target))
      roles.set(s.target, Role::Temp);
  }
  return roles;
}

std::vector<VarId> RoleMap::vars_with(Role r) const {
  std::vector<VarId> out;
  for (int i = 0; i < kVocabVars; ++i)
    if (roles_[i] && *roles_[i] == r)
      out.push_back(VarId::from_dense(i));
  return out;
}

} // namespace progeq
