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

#include "progeq/ast.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <charconv>

namespace progeq {

namespace {

constexpr Type S = Type::Scalar;
constexpr Type V = Type::Vector;

constexpr std::array<OpInfo, kNumOps> kOpTable = {{
    {"", 0, S, {S, S}},     // Var (type comes from the VarId)
    {"0s", 0, S, {S, S}},
    {"1s", 0, S, {S, S}},
    {"0v", 0, V, {S, S}},
    {"+s", 2, S, {S, S}},
    {"-s", 2, S, {S, S}},
    {"*s", 2, S, {S, S}},
    {"/s", 2, S, {S, S}},
    {"ns", 1, S, {S, S}},
    {"+v", 2, V, {V, V}},
    {"-v", 2, V, {V, V}},
    {"nv", 1, V, {V, V}},
    {"*sv", 2, V, {S, V}},
    {"f1s", 2, S, {S, S}},
    {"f2s", 2, S, {S, S}},
    {"f3s", 2, S, {S, S}},
    {"f4s", 2, S, {S, S}},
    {"f5s", 2, S, {S, S}},
    {"f1v", 2, V, {S, S}},
    {"f2v", 2, V, {S, S}},
    {"f3v", 2, V, {S, S}},
    {"f4v", 2, V, {S, S}},
    {"f5v", 2, V, {S, S}},
    {"g1s", 1, S, {V, V}},
    {"g2s", 1, S, {V, V}},
    {"g3s", 1, S, {V, V}},
    {"g1v", 2, V, {V, V}},
    {"g2v", 2, V, {V, V}},
    {"g3v", 2, V, {V, V}},
}};

} // namespace

std::string_view type_name(Type t) {
  return t == Type::Scalar ? "scalar" : "vector";
}

const OpInfo &op_info(Op op) { return kOpTable[static_cast<int>(op)]; }

std::optional<Op> op_from_token(std::string_view token) {
  for (int i = 1; i < kNumOps; ++i)
    if (kOpTable[i].token == token)
      return static_cast<Op>(i);
  return std::nullopt;
}

bool is_function(Op op) { return op >= Op::F1s; }

bool is_constant(Op op) {
  return op == Op::ZeroS || op == Op::OneS || op == Op::ZeroV;
}

std::optional<VarId> VarId::parse(std::string_view token) {
  if (token.size() != 3 || (token[0] != 's' && token[0] != 'v'))
    return std::nullopt;
  int n = 0;
  auto [ptr, ec] = std::from_chars(token.data() + 1, token.data() + 3, n);
  if (ec != std::errc{} || ptr != token.data() + 3)
    return std::nullopt;
  VarId v;
  v.type = token[0] == 's' ? Type::Scalar : Type::Vector;
  int limit = v.type == Type::Scalar ? kMaxScalarVars : kMaxVectorVars;
  if (n < 1 || n > limit)
    return std::nullopt;
  v.index = static_cast<std::uint8_t>(n);
  return v;
}

std::string VarId::str() const {
  std::string out(3, '0');
  out[0] = type == Type::Scalar ? 's' : 'v';
  out[1] = static_cast<char>('0' + index / 10);
  out[2] = static_cast<char>('0' + index % 10);
  return out;
}

int VarId::dense() const {
  return type == Type::Scalar ? index - 1 : kMaxScalarVars + index - 1;
}

VarId VarId::from_dense(int dense) {
  assert(dense >= 0 && dense < kVocabVars);
  if (dense < kMaxScalarVars)
    return VarId{Type::Scalar, static_cast<std::uint8_t>(dense + 1)};
  return VarId{Type::Vector,
               static_cast<std::uint8_t>(dense - kMaxScalarVars + 1)};
}

Expr Expr::unary(Op op, Expr a) {
  Expr e{op, {}, {}};
  e.args.push_back(std::move(a));
  return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  Expr e{op, {}, {}};
  e.args.reserve(2);
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Type Expr::type() const {
  return op == Op::Var ? var.type : op_info(op).result;
}

int Expr::node_count() const {
  int n = 1;
  for (const Expr &a : args)
    n += a.node_count();
  return n;
}

int Expr::depth() const {
  int d = 0;
  for (const Expr &a : args)
    d = std::max(d, a.depth());
  return d + 1;
}

int Program::node_count() const {
  int n = 0;
  for (const Stmt &s : stmts)
    n += 1 + s.rhs.node_count();
  return n;
}

int Program::max_depth() const {
  int d = 0;
  for (const Stmt &s : stmts)
    d = std::max(d, s.rhs.depth());
  return d;
}

int Program::output_count() const {
  return static_cast<int>(std::count_if(
      stmts.begin(), stmts.end(), [](const Stmt &s) { return s.is_output; }));
}

static int count_functions(const Expr &e) {
  int n = is_function(e.op) ? 1 : 0;
  for (const Expr &a : e.args)
    n += count_functions(a);
  return n;
}

int Program::function_count() const {
  int n = 0;
  for (const Stmt &s : stmts)
    n += count_functions(s.rhs);
  return n;
}

std::optional<NodePath> NodePath::parse(std::string_view token) {
  if (token.empty() || token[0] != 'N' ||
      token.size() > static_cast<std::size_t>(kMaxLetters) + 1)
    return std::nullopt;
  for (char c : token.substr(1))
    if (c != 'l' && c != 'r')
      return std::nullopt;
  return NodePath(std::string(token.substr(1)));
}

NodePath NodePath::child(char dir) const {
  assert(can_descend());
  return NodePath(dirs_ + dir);
}

const Expr *resolve(const Expr &root, const NodePath &path) {
  const Expr *cur = &root;
  for (char c : path.dirs()) {
    std::size_t idx = c == 'l' ? 0 : 1;
    if (idx >= cur->args.size())
      return nullptr;
    cur = &cur->args[idx];
  }
  return cur;
}

Expr *resolve(Expr &root, const NodePath &path) {
  return const_cast<Expr *>(resolve(std::as_const(root), path));
}

static void collect_paths(const Expr &e, const NodePath &at,
                          std::vector<NodePath> &out) {
  out.push_back(at);
  if (!at.can_descend())
    return;
  if (e.args.size() >= 1)
    collect_paths(e.args[0], at.child('l'), out);
  if (e.args.size() >= 2)
    collect_paths(e.args[1], at.child('r'), out);
}

std::vector<NodePath> addressable_paths(const Expr &root) {
  std::vector<NodePath> out;
  collect_paths(root, NodePath{}, out);
  return out;
}

void collect_vars(const Expr &e, std::vector<VarId> &out) {
  if (e.op == Op::Var) {
    if (std::find(out.begin(), out.end(), e.var) == out.end())
      out.push_back(e.var);
    return;
  }
  for (const Expr &a : e.args)
    collect_vars(a, out);
}

bool reads_var(const Expr &e, VarId v) {
  if (e.op == Op::Var)
    return e.var == v;
  return std::any_of(e.args.begin(), e.args.end(),
                     [&](const Expr &a) { return reads_var(a, v); });
}

int count_var(const Expr &e, VarId v) {
  if (e.op == Op::Var)
    return e.var == v ? 1 : 0;
  int n = 0;
  for (const Expr &a : e.args)
    n += count_var(a, v);
  return n;
}

} // namespace progeq
