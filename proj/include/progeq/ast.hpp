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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace progeq {

enum class Type : std::uint8_t { Scalar, Vector };

std::string_view type_name(Type t);

// Node kinds of the program language. Function tokens follow a fixed
// signature table:
//   f1s..f5s : (s,s) -> s      f1v..f5v : (s,s) -> v
//   g1s..g3s : (v)   -> s      g1v..g3v : (v,v) -> v
enum class Op : std::uint8_t {
  Var,
  ZeroS,
  OneS,
  ZeroV,
  AddS,
  SubS,
  MulS,
  DivS,
  NegS,
  AddV,
  SubV,
  NegV,
  MulSV,
  F1s, F2s, F3s, F4s, F5s,
  F1v, F2v, F3v, F4v, F5v,
  G1s, G2s, G3s,
  G1v, G2v, G3v,
};

inline constexpr int kNumOps = static_cast<int>(Op::G3v) + 1;

struct OpInfo {
  std::string_view token;
  int arity;
  Type result;
  Type args[2];
};

const OpInfo &op_info(Op op);
std::optional<Op> op_from_token(std::string_view token);
bool is_function(Op op);
bool is_constant(Op op);

inline constexpr int kMaxScalarVars = 30;
inline constexpr int kMaxVectorVars = 15;

// A variable token: s01..s30 or v01..v15.
struct VarId {
  Type type = Type::Scalar;
  std::uint8_t index = 1;

  static std::optional<VarId> parse(std::string_view token);
  std::string str() const;
  // Dense index over the whole vocabulary: scalars first, then vectors.
  int dense() const;
  static VarId from_dense(int dense);

  friend bool operator==(const VarId &, const VarId &) = default;
  friend auto operator<=>(const VarId &a, const VarId &b) {
    return a.dense() <=> b.dense();
  }
};

inline constexpr int kVocabVars = kMaxScalarVars + kMaxVectorVars;

struct Expr {
  Op op = Op::Var;
  VarId var{};
  std::vector<Expr> args;

  static Expr variable(VarId v) { return Expr{Op::Var, v, {}}; }
  static Expr constant(Op op) { return Expr{op, {}, {}}; }
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);

  Type type() const;
  bool is_leaf() const { return args.empty(); }
  bool is_var() const { return op == Op::Var; }
  int node_count() const;
  // Leaf depth is 1; "( +s a b )" has depth 2.
  int depth() const;

  friend bool operator==(const Expr &, const Expr &) = default;
};

struct Stmt {
  VarId target;
  bool is_output = false;
  Expr rhs;

  friend bool operator==(const Stmt &, const Stmt &) = default;
};

struct Program {
  std::vector<Stmt> stmts;

  std::size_t size() const { return stmts.size(); }
  // Targets count as one node each, plus every RHS node.
  int node_count() const;
  int max_depth() const;
  int output_count() const;
  int function_count() const;

  friend bool operator==(const Program &, const Program &) = default;
};

// Address of a node inside a statement's RHS: "N" followed by up to four
// l/r letters. Only nodes at depth <= 5 are addressable.
class NodePath {
public:
  static constexpr int kMaxLetters = 4;

  NodePath() = default;
  static std::optional<NodePath> parse(std::string_view token);

  std::string_view dirs() const { return dirs_; }
  int length() const { return static_cast<int>(dirs_.size()); }
  std::string str() const { return "N" + dirs_; }
  NodePath child(char dir) const;
  bool can_descend() const { return length() < kMaxLetters; }

  friend bool operator==(const NodePath &, const NodePath &) = default;
  friend auto operator<=>(const NodePath &a, const NodePath &b) {
    return a.str() <=> b.str();
  }

private:
  explicit NodePath(std::string dirs) : dirs_(std::move(dirs)) {}
  std::string dirs_;
};

const Expr *resolve(const Expr &root, const NodePath &path);
Expr *resolve(Expr &root, const NodePath &path);

// Every addressable node of `root` in preorder ("N", "Nl", "Nll", ...).
std::vector<NodePath> addressable_paths(const Expr &root);

void collect_vars(const Expr &e, std::vector<VarId> &out);
bool reads_var(const Expr &e, VarId v);
int count_var(const Expr &e, VarId v);

} // namespace progeq
