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

#include "progeq/normalized.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "progeq/random.hpp"

namespace progeq {

static Expr rename_expr(const Expr &e, const Renaming &r) {
  if (e.op == Op::Var) {
    const auto &to = r[e.var.dense()];
    return Expr::variable(to ? *to : e.var);
  }
  Expr out{e.op, {}, {}};
  out.args.reserve(e.args.size());
  for (const Expr &a : e.args)
    out.args.push_back(rename_expr(a, r));
  return out;
}

Program rename_program(const Program &p, const Renaming &r) {
  Program out;
  out.stmts.reserve(p.stmts.size());
  for (const Stmt &s : p.stmts) {
    const auto &to = r[s.target.dense()];
    out.stmts.push_back({to ? *to : s.target, s.is_output, rename_expr(s.rhs, r)});
  }
  return out;
}

Renaming random_renaming(const Program &p, std::uint64_t seed) {
  Rng rng(seed);
  auto used = used_vars(p);
  Renaming r{};
  for (Type t : {Type::Scalar, Type::Vector}) {
    int base = t == Type::Scalar ? 0 : kMaxScalarVars;
    int n = t == Type::Scalar ? kMaxScalarVars : kMaxVectorVars;
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i)
      pool[i] = base + i;
    std::shuffle(pool.begin(), pool.end(), rng);
    int next = 0;
    for (int i = base; i < base + n; ++i)
      if (used[i])
        r[i] = VarId::from_dense(pool[next++]);
  }
  return r;
}

Renaming random_permutation(std::uint64_t seed) {
  Rng rng(seed);
  Renaming r{};
  for (Type t : {Type::Scalar, Type::Vector}) {
    int base = t == Type::Scalar ? 0 : kMaxScalarVars;
    int n = t == Type::Scalar ? kMaxScalarVars : kMaxVectorVars;
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i)
      pool[i] = base + i;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int i = 0; i < n; ++i)
      r[base + i] = VarId::from_dense(pool[i]);
  }
  return r;
}

Program encode_rename(const Program &p, std::uint64_t seed) {
  return rename_program(p, random_renaming(p, seed));
}

namespace {

enum class Family { Input, Temp, Output };

struct Node {
  enum Kind { Name, Num, Neg, Bin, Call } kind;
  std::string text; // name, number or function token
  char bin = 0;     // + - * /
  Op call = Op::Var;
  int slot = -1;    // type slot
  std::vector<std::unique_ptr<Node>> kids;
};

struct RawStmt {
  std::string target;
  std::unique_ptr<Node> rhs;
};

std::vector<std::string> lex(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
      out.emplace_back(text.substr(start, i - start));
    } else if (std::string_view("+-*/=();,").find(c) != std::string_view::npos) {
      out.emplace_back(1, c);
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

class InfixParser {
public:
  explicit InfixParser(std::vector<std::string> toks) : toks_(std::move(toks)) {}

  std::vector<RawStmt> program() {
    std::vector<RawStmt> out;
    while (pos_ < toks_.size()) {
      RawStmt s;
      s.target = name(take());
      expect("=");
      s.rhs = sum();
      expect(";");
      out.push_back(std::move(s));
    }
    return out;
  }

  std::map<std::string, int> names;
  int slots = 0;

private:
  const std::string &peek() const {
    static const std::string end;
    return pos_ < toks_.size() ? toks_[pos_] : end;
  }
  std::string take() {
    if (pos_ >= toks_.size())
      throw ParseError("unexpected end of input");
    return toks_[pos_++];
  }
  void expect(const char *t) {
    std::string got = take();
    if (got != t)
      throw ParseError("expected '" + std::string(t) + "', got '" + got + "'");
  }

  std::string name(std::string t) {
    if (t.size() < 2 || (t[0] != 'i' && t[0] != 't' && t[0] != 'o') ||
        !std::all_of(t.begin() + 1, t.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError("name '" + t + "' is outside the i/t/o families");
    if (!names.count(t))
      names[t] = slots++;
    return t;
  }

  std::unique_ptr<Node> make(Node::Kind k) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->slot = slots++;
    return n;
  }

  std::unique_ptr<Node> sum() {
    auto lhs = product();
    while (peek() == "+" || peek() == "-") {
      auto n = make(Node::Bin);
      n->bin = take()[0];
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(product());
      lhs = std::move(n);
    }
    return lhs;
  }

  std::unique_ptr<Node> product() {
    auto lhs = unary();
    while (peek() == "*" || peek() == "/") {
      auto n = make(Node::Bin);
      n->bin = take()[0];
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(unary());
      lhs = std::move(n);
    }
    return lhs;
  }

  std::unique_ptr<Node> unary() {
    if (peek() == "-") {
      take();
      auto n = make(Node::Neg);
      n->kids.push_back(unary());
      return n;
    }
    return primary();
  }

  std::unique_ptr<Node> primary() {
    std::string t = take();
    if (t == "(") {
      auto e = sum();
      expect(")");
      return e;
    }
    if (t == "0" || t == "1") {
      auto n = make(Node::Num);
      n->text = t;
      return n;
    }
    if (auto op = op_from_token(t); op && is_function(*op)) {
      auto n = make(Node::Call);
      n->call = *op;
      expect("(");
      n->kids.push_back(sum());
      while (peek() == ",") {
        take();
        n->kids.push_back(sum());
      }
      expect(")");
      if (static_cast<int>(n->kids.size()) != op_info(*op).arity)
        throw ParseError("arity mismatch for '" + t + "': expected " +
                         std::to_string(op_info(*op).arity) + ", got " +
                         std::to_string(n->kids.size()));
      return n;
    }
    auto n = std::make_unique<Node>();
    n->kind = Node::Name;
    n->text = name(t);
    n->slot = names[n->text];
    return n;
  }

  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
};

// Flow-insensitive type inference over slots.
class Typer {
public:
  explicit Typer(int slots) : types_(slots) {}

  std::optional<Type> infer(Node &n) {
    switch (n.kind) {
    case Node::Name:
    case Node::Num:
      return types_[n.slot];
    case Node::Neg:
      if (auto t = infer(*n.kids[0]))
        assign(n, *t);
      else if (types_[n.slot])
        push(*n.kids[0], *types_[n.slot]);
      return types_[n.slot];
    case Node::Call: {
      const OpInfo &info = op_info(n.call);
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        push(*n.kids[i], info.args[i]);
        infer(*n.kids[i]);
      }
      assign(n, info.result);
      return info.result;
    }
    case Node::Bin:
      break;
    }
    auto l = infer(*n.kids[0]);
    auto r = infer(*n.kids[1]);
    switch (n.bin) {
    case '+':
    case '-':
      if (l)
        push(*n.kids[1], *l), assign(n, *l);
      else if (r)
        push(*n.kids[0], *r), assign(n, *r);
      else if (types_[n.slot])
        push(*n.kids[0], *types_[n.slot]), push(*n.kids[1], *types_[n.slot]);
      break;
    case '*':
      if (l == Type::Vector)
        throw ParseError("vector on the left of '*' is not representable");
      if (r) {
        push(*n.kids[0], Type::Scalar);
        assign(n, *r);
      } else if (types_[n.slot]) {
        push(*n.kids[0], Type::Scalar);
        push(*n.kids[1], *types_[n.slot]);
      }
      break;
    case '/':
      push(*n.kids[0], Type::Scalar);
      push(*n.kids[1], Type::Scalar);
      assign(n, Type::Scalar);
      break;
    }
    return types_[n.slot];
  }

  void push(Node &n, Type t) {
    assign(n, t);
    switch (n.kind) {
    case Node::Neg:
      push(*n.kids[0], t);
      break;
    case Node::Bin:
      if (n.bin == '+' || n.bin == '-') {
        push(*n.kids[0], t);
        push(*n.kids[1], t);
      } else if (n.bin == '*') {
        push(*n.kids[0], Type::Scalar);
        push(*n.kids[1], t);
      } else if (t != Type::Scalar) {
        throw ParseError("division produces a scalar");
      }
      break;
    default:
      break;
    }
  }

  void assign(const Node &n, Type t) {
    auto &slot = types_[n.slot];
    if (slot && *slot != t)
      throw ParseError("type mismatch for '" +
                       (n.text.empty() ? std::string("expression") : n.text) + "'");
    if (!slot) {
      slot = t;
      changed_ = true;
    }
  }

  bool run_pass(std::vector<RawStmt> &stmts, const std::map<std::string, int> &names) {
    changed_ = false;
    for (auto &s : stmts) {
      int slot = names.at(s.target);
      if (auto t = infer(*s.rhs)) {
        if (types_[slot] && *types_[slot] != *t)
          throw ParseError("type mismatch assigning to '" + s.target + "'");
        if (!types_[slot]) {
          types_[slot] = *t;
          changed_ = true;
        }
      } else if (types_[slot]) {
        push(*s.rhs, *types_[slot]);
      }
    }
    return changed_;
  }

  std::vector<std::optional<Type>> types_;

private:
  bool changed_ = false;
};

Expr build(const Node &n, const Typer &typer,
           const std::map<std::string, VarId> &vars) {
  Type t = *typer.types_[n.slot];
  switch (n.kind) {
  case Node::Name:
    return Expr::variable(vars.at(n.text));
  case Node::Num:
    if (n.text == "1") {
      if (t != Type::Scalar)
        throw ParseError("constant 1 used as a vector");
      return Expr::constant(Op::OneS);
    }
    return Expr::constant(t == Type::Scalar ? Op::ZeroS : Op::ZeroV);
  case Node::Neg:
    return Expr::unary(t == Type::Scalar ? Op::NegS : Op::NegV,
                       build(*n.kids[0], typer, vars));
  case Node::Call: {
    Expr e{n.call, {}, {}};
    for (const auto &k : n.kids)
      e.args.push_back(build(*k, typer, vars));
    return e;
  }
  case Node::Bin:
    break;
  }
  Expr l = build(*n.kids[0], typer, vars);
  Expr r = build(*n.kids[1], typer, vars);
  Op op = Op::Var;
  switch (n.bin) {
  case '+': op = t == Type::Scalar ? Op::AddS : Op::AddV; break;
  case '-': op = t == Type::Scalar ? Op::SubS : Op::SubV; break;
  case '*': op = t == Type::Scalar ? Op::MulS : Op::MulSV; break;
  case '/': op = Op::DivS; break;
  }
  return Expr::binary(op, std::move(l), std::move(r));
}

} // namespace

Program parse_normalized_source(std::string_view text, const Limits &limits,
                                std::optional<std::uint64_t> encode_seed) {
  InfixParser parser(lex(text));
  std::vector<RawStmt> raw = parser.program();
  if (raw.empty())
    throw ParseError("empty program");

  Typer typer(parser.slots);
  while (typer.run_pass(raw, parser.names)) {
  }
  // Default unconstrained names to scalar one at a time, in appearance
  // order, re-propagating after each choice.
  std::vector<std::pair<int, std::string>> order;
  for (const auto &[name, slot] : parser.names)
    order.emplace_back(slot, name);
  std::sort(order.begin(), order.end());
  for (;;) {
    bool any = false;
    for (const auto &entry : order)
      if (!typer.types_[entry.first]) {
        typer.types_[entry.first] = Type::Scalar;
        any = true;
        break;
      }
    for (std::size_t s = 0; !any && s < typer.types_.size(); ++s)
      if (!typer.types_[s]) {
        typer.types_[s] = Type::Scalar;
        any = true;
      }
    if (!any)
      break;
    while (typer.run_pass(raw, parser.names)) {
    }
  }

  std::map<std::string, VarId> vars;
  int next_scalar = 1, next_vector = 1;
  for (const auto &[slot, name] : order) {
    Type t = *typer.types_[slot];
    int &next = t == Type::Scalar ? next_scalar : next_vector;
    int cap = t == Type::Scalar ? kMaxScalarVars : kMaxVectorVars;
    if (next > cap)
      throw ParseError("limit violation: too many " + std::string(type_name(t)) +
                       " variables");
    vars[name] = VarId{t, static_cast<std::uint8_t>(next++)};
  }

  Program p;
  std::map<std::string, std::size_t> last_assign;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    Stmt s{vars.at(raw[k].target), false, build(*raw[k].rhs, typer, vars)};
    if (s.rhs.type() != s.target.type)
      throw ParseError("type mismatch assigning to '" + raw[k].target + "'");
    last_assign[raw[k].target] = k;
    p.stmts.push_back(std::move(s));
  }
  for (const auto &[name, k] : last_assign)
    if (name[0] == 'o')
      p.stmts[k].is_output = true;
  for (const auto &[name, k] : last_assign)
    if (name[0] == 'i')
      throw ParseError("input variable '" + name + "' is assigned");

  if (encode_seed)
    p = encode_rename(p, *encode_seed);
  if (auto err = structural_error(p))
    throw ParseError(*err);
  LimitReport report = check_limits(p, limits);
  if (!report.ok())
    throw ParseError("limit violation: " + report.violations.front());
  return p;
}

} // namespace progeq
