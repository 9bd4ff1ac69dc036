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

#include "progeq/rewrite.hpp"

#include <algorithm>

namespace progeq {

std::string_view failure_name(Failure f) {
  switch (f) {
  case Failure::IllegalPattern:
    return "IllegalPattern";
  case Failure::TypeMismatch:
    return "TypeMismatch";
  case Failure::DependenceViolation:
    return "DependenceViolation";
  case Failure::LimitExceeded:
    return "LimitExceeded";
  case Failure::BadAddress:
    return "BadAddress";
  case Failure::VarConflict:
    return "VarConflict";
  }
  return "?";
}

namespace {

using Local = std::variant<Expr, Failure>;

Expr zero(Type t) { return Expr::constant(t == Type::Scalar ? Op::ZeroS : Op::ZeroV); }
Expr one() { return Expr::constant(Op::OneS); }

bool is_zero(const Expr &e) { return e.op == Op::ZeroS || e.op == Op::ZeroV; }
bool is_one(const Expr &e) { return e.op == Op::OneS; }
bool is_add_sub_s(Op op) { return op == Op::AddS || op == Op::SubS; }
bool is_add_sub_v(Op op) { return op == Op::AddV || op == Op::SubV; }
Op to_vector(Op op) { return op == Op::AddS ? Op::AddV : Op::SubV; }
Op to_scalar(Op op) { return op == Op::AddV ? Op::AddS : Op::SubS; }

Local neutral_op(const Expr &e) {
  switch (e.op) {
  case Op::AddS:
  case Op::AddV:
    if (is_zero(e.args[0]))
      return e.args[1];
    if (is_zero(e.args[1]))
      return e.args[0];
    break;
  case Op::SubS:
  case Op::SubV:
    if (is_zero(e.args[1]))
      return e.args[0];
    break;
  case Op::MulS:
    if (is_one(e.args[0]))
      return e.args[1];
    if (is_one(e.args[1]))
      return e.args[0];
    break;
  case Op::MulSV:
    if (is_one(e.args[0]))
      return e.args[1];
    break;
  case Op::DivS:
    if (is_one(e.args[1]))
      return e.args[0];
    break;
  default:
    break;
  }
  return Failure::IllegalPattern;
}

Local cancel(const Expr &e) {
  if ((e.op == Op::SubS || e.op == Op::SubV) && e.args[0] == e.args[1])
    return zero(e.type());
  if (e.op == Op::DivS && e.args[0] == e.args[1])
    return one();
  return Failure::IllegalPattern;
}

Local double_op(const Expr &e) {
  if ((e.op == Op::NegS || e.op == Op::NegV) && e.args[0].op == e.op)
    return e.args[0].args[0];
  if (e.op == Op::DivS && is_one(e.args[0]) && e.args[1].op == Op::DivS &&
      is_one(e.args[1].args[0]))
    return e.args[1].args[1];
  return Failure::IllegalPattern;
}

Local absorb_op(const Expr &e) {
  if (e.op == Op::MulS && (e.args[0].op == Op::ZeroS || e.args[1].op == Op::ZeroS))
    return zero(Type::Scalar);
  if (e.op == Op::MulSV && (e.args[0].op == Op::ZeroS || e.args[1].op == Op::ZeroV))
    return zero(Type::Vector);
  return Failure::IllegalPattern;
}

Local commute(const Expr &e) {
  if (e.op == Op::AddS || e.op == Op::MulS || e.op == Op::AddV)
    return Expr::binary(e.op, e.args[1], e.args[0]);
  return Failure::IllegalPattern;
}

// ((a±b)×c) -> (a×c ± b×c); ((a±b)/c) -> (a/c ± b/c); ((a±b)·v) -> (a·v ± b·v)
Local distribute_left(const Expr &e) {
  if ((e.op == Op::MulS || e.op == Op::DivS || e.op == Op::MulSV) &&
      is_add_sub_s(e.args[0].op)) {
    const Expr &sum = e.args[0];
    const Expr &c = e.args[1];
    Op outer = e.op == Op::MulSV ? to_vector(sum.op) : sum.op;
    return Expr::binary(outer, Expr::binary(e.op, sum.args[0], c),
                        Expr::binary(e.op, sum.args[1], c));
  }
  return Failure::IllegalPattern;
}

// (a×(b±c)) -> (a×b ± a×c); (a·(v±w)) -> (a·v ± a·w)
Local distribute_right(const Expr &e) {
  if ((e.op == Op::MulS && is_add_sub_s(e.args[1].op)) ||
      (e.op == Op::MulSV && is_add_sub_v(e.args[1].op))) {
    const Expr &a = e.args[0];
    const Expr &sum = e.args[1];
    return Expr::binary(sum.op, Expr::binary(e.op, a, sum.args[0]),
                        Expr::binary(e.op, a, sum.args[1]));
  }
  return Failure::IllegalPattern;
}

// (a×b ± a×c) -> a×(b±c); (a·v ± a·w) -> a·(v±w)
Local factor_left(const Expr &e) {
  Op prod = is_add_sub_s(e.op) ? Op::MulS : is_add_sub_v(e.op) ? Op::MulSV : Op::Var;
  if (prod != Op::Var && e.args[0].op == prod && e.args[1].op == prod &&
      e.args[0].args[0] == e.args[1].args[0])
    return Expr::binary(prod, e.args[0].args[0],
                        Expr::binary(e.op, e.args[0].args[1], e.args[1].args[1]));
  return Failure::IllegalPattern;
}

// (a×c ± b×c) -> (a±b)×c; (a/c ± b/c) -> (a±b)/c; (a·v ± b·v) -> (a±b)·v
Local factor_right(const Expr &e) {
  if (is_add_sub_s(e.op)) {
    for (Op prod : {Op::MulS, Op::DivS})
      if (e.args[0].op == prod && e.args[1].op == prod &&
          e.args[0].args[1] == e.args[1].args[1])
        return Expr::binary(prod,
                            Expr::binary(e.op, e.args[0].args[0], e.args[1].args[0]),
                            e.args[0].args[1]);
  } else if (is_add_sub_v(e.op)) {
    if (e.args[0].op == Op::MulSV && e.args[1].op == Op::MulSV &&
        e.args[0].args[1] == e.args[1].args[1])
      return Expr::binary(
          Op::MulSV,
          Expr::binary(to_scalar(e.op), e.args[0].args[0], e.args[1].args[0]),
          e.args[0].args[1]);
  }
  return Failure::IllegalPattern;
}

// a(bc) -> (ab)c, a+(b+c) -> (a+b)+c, a·(b·v) -> (ab)·v
Local associative_left(const Expr &e) {
  if ((e.op == Op::MulS || e.op == Op::AddS || e.op == Op::AddV ||
       e.op == Op::MulSV) &&
      e.args[1].op == e.op) {
    const Expr &a = e.args[0];
    const Expr &b = e.args[1].args[0];
    const Expr &c = e.args[1].args[1];
    Op inner = e.op == Op::MulSV ? Op::MulS : e.op;
    return Expr::binary(e.op, Expr::binary(inner, a, b), c);
  }
  return Failure::IllegalPattern;
}

// (ab)c -> a(bc), (ab)/c -> a(b/c), (a+b)+c -> a+(b+c), (ab)·v -> a·(b·v)
Local associative_right(const Expr &e) {
  Op want = e.op == Op::DivS || e.op == Op::MulSV ? Op::MulS : e.op;
  if ((e.op == Op::MulS || e.op == Op::DivS || e.op == Op::AddS ||
       e.op == Op::AddV || e.op == Op::MulSV) &&
      e.args[0].op == want) {
    const Expr &a = e.args[0].args[0];
    const Expr &b = e.args[0].args[1];
    const Expr &c = e.args[1];
    Op outer = e.op == Op::DivS ? Op::MulS : e.op;
    return Expr::binary(outer, a, Expr::binary(e.op, b, c));
  }
  return Failure::IllegalPattern;
}

Local flip_left(const Expr &e) {
  if ((e.op == Op::NegS && e.args[0].op == Op::SubS) ||
      (e.op == Op::NegV && e.args[0].op == Op::SubV))
    return Expr::binary(e.args[0].op, e.args[0].args[1], e.args[0].args[0]);
  return Failure::IllegalPattern;
}

Local flip_right(const Expr &e) {
  if (e.op == Op::DivS && e.args[1].op == Op::DivS)
    return Expr::binary(Op::MulS, e.args[0],
                        Expr::binary(Op::DivS, e.args[1].args[1], e.args[1].args[0]));
  return Failure::IllegalPattern;
}

Local rewrite_node(RuleName name, const Expr &e) {
  Type t = e.type();
  switch (name) {
  case RuleName::AddZero:
    return Expr::binary(t == Type::Scalar ? Op::AddS : Op::AddV, zero(t), e);
  case RuleName::SubZero:
    return Expr::binary(t == Type::Scalar ? Op::SubS : Op::SubV, e, zero(t));
  case RuleName::MultOne:
    return Expr::binary(t == Type::Scalar ? Op::MulS : Op::MulSV, one(), e);
  case RuleName::DivOne:
    if (t != Type::Scalar)
      return Failure::TypeMismatch;
    return Expr::binary(Op::DivS, e, one());
  case RuleName::NeutralOp:
    return neutral_op(e);
  case RuleName::Cancel:
    return cancel(e);
  case RuleName::DoubleOp:
    return double_op(e);
  case RuleName::AbsorbOp:
    return absorb_op(e);
  case RuleName::Commute:
    return commute(e);
  case RuleName::DistributeLeft:
    return distribute_left(e);
  case RuleName::DistributeRight:
    return distribute_right(e);
  case RuleName::FactorLeft:
    return factor_left(e);
  case RuleName::FactorRight:
    return factor_right(e);
  case RuleName::AssociativeLeft:
    return associative_left(e);
  case RuleName::AssociativeRight:
    return associative_right(e);
  case RuleName::FlipLeft:
    return flip_left(e);
  case RuleName::FlipRight:
    return flip_right(e);
  default:
    return Failure::IllegalPattern;
  }
}

// Index of the most recent assignment to `v` strictly before `k`.
std::optional<std::size_t> last_def_before(const Program &p, std::size_t k, VarId v) {
  for (std::size_t j = k; j-- > 0;)
    if (p.stmts[j].target == v)
      return j;
  return std::nullopt;
}

bool assigned_in(const Program &p, std::size_t from, std::size_t to,
                 const std::vector<VarId> &vars) {
  for (std::size_t m = from; m < to; ++m)
    if (std::find(vars.begin(), vars.end(), p.stmts[m].target) != vars.end())
      return true;
  return false;
}

Expr replace_matches(const Expr &e, const Expr &pattern, VarId v, int &count) {
  if (e == pattern) {
    ++count;
    return Expr::variable(v);
  }
  Expr out{e.op, e.var, {}};
  out.args.reserve(e.args.size());
  for (const Expr &a : e.args)
    out.args.push_back(replace_matches(a, pattern, v, count));
  return out;
}

Expr substitute_var(const Expr &e, VarId v, const Expr &with) {
  if (e.op == Op::Var)
    return e.var == v ? with : e;
  Expr out{e.op, e.var, {}};
  out.args.reserve(e.args.size());
  for (const Expr &a : e.args)
    out.args.push_back(substitute_var(a, v, with));
  return out;
}

bool var_used(const Program &p, VarId v) {
  for (const Stmt &s : p.stmts)
    if (s.target == v || reads_var(s.rhs, v))
      return true;
  return false;
}

bool is_input(const Program &p, VarId v) {
  for (const Stmt &s : p.stmts) {
    if (reads_var(s.rhs, v))
      return true;
    if (s.target == v)
      return false;
  }
  return false;
}

ApplyOutcome finish(Program p, const Limits &limits) {
  if (structural_error(p))
    return Failure::DependenceViolation;
  if (!check_limits(p, limits).ok())
    return Failure::LimitExceeded;
  return p;
}

ApplyOutcome apply_statement_rule(const RewriteRule &rule, const Program &p,
                                  std::size_t k, const Limits &limits) {
  const Stmt &stmt = p.stmts[k];
  switch (rule.name) {
  case RuleName::SwapPrev: {
    if (k == 0)
      return Failure::BadAddress;
    const Stmt &prev = p.stmts[k - 1];
    if (prev.target == stmt.target || reads_var(stmt.rhs, prev.target) ||
        reads_var(prev.rhs, stmt.target))
      return Failure::DependenceViolation;
    Program out = p;
    std::swap(out.stmts[k - 1], out.stmts[k]);
    return finish(std::move(out), limits);
  }
  case RuleName::DeleteStm: {
    if (stmt.is_output)
      return Failure::IllegalPattern;
    for (std::size_t m = k + 1; m < p.size(); ++m) {
      if (reads_var(p.stmts[m].rhs, stmt.target))
        return Failure::DependenceViolation;
      if (p.stmts[m].target == stmt.target)
        break;
    }
    Program out = p;
    out.stmts.erase(out.stmts.begin() + static_cast<std::ptrdiff_t>(k));
    return finish(std::move(out), limits);
  }
  case RuleName::UseVar:
  case RuleName::Inline: {
    VarId v = *rule.var;
    bool inline_rule = rule.name == RuleName::Inline;
    if (inline_rule && !reads_var(stmt.rhs, v))
      return Failure::IllegalPattern;
    auto j = last_def_before(p, k, v);
    if (!j)
      return Failure::DependenceViolation;
    const Expr &def = p.stmts[*j].rhs;
    std::vector<VarId> deps;
    collect_vars(def, deps);
    if (std::find(deps.begin(), deps.end(), v) != deps.end())
      return Failure::DependenceViolation;
    deps.push_back(v);
    if (assigned_in(p, *j + 1, k, deps))
      return Failure::DependenceViolation;
    Program out = p;
    if (inline_rule) {
      out.stmts[k].rhs = substitute_var(stmt.rhs, v, def);
    } else {
      int count = 0;
      out.stmts[k].rhs = replace_matches(stmt.rhs, def, v, count);
      if (count == 0)
        return Failure::IllegalPattern;
    }
    return finish(std::move(out), limits);
  }
  case RuleName::NewTmp: {
    const Expr *node = resolve(stmt.rhs, *rule.path);
    if (!node)
      return Failure::BadAddress;
    VarId v = *rule.var;
    if (node->type() != v.type)
      return Failure::TypeMismatch;
    if (var_used(p, v))
      return Failure::VarConflict;
    Program out = p;
    Stmt def{v, false, *node};
    *resolve(out.stmts[k].rhs, *rule.path) = Expr::variable(v);
    out.stmts.insert(out.stmts.begin() + static_cast<std::ptrdiff_t>(k),
                     std::move(def));
    return finish(std::move(out), limits);
  }
  case RuleName::Rename: {
    VarId v = *rule.var;
    VarId old = stmt.target;
    if (stmt.is_output)
      return Failure::IllegalPattern;
    if (v.type != old.type)
      return Failure::TypeMismatch;
    if (v == old || is_input(p, v))
      return Failure::VarConflict;
    std::size_t next = k + 1;
    while (next < p.size() && p.stmts[next].target != old)
      ++next;
    for (std::size_t m = k + 1; m < next; ++m)
      if (p.stmts[m].target == v)
        return Failure::VarConflict;
    for (std::size_t m = k + 1; m < p.size(); ++m) {
      if (reads_var(p.stmts[m].rhs, v))
        return Failure::VarConflict;
      if (p.stmts[m].target == v)
        break;
    }
    Program out = p;
    out.stmts[k].target = v;
    Expr with = Expr::variable(v);
    std::size_t last = std::min(next, p.size() - 1);
    for (std::size_t m = k + 1; m <= last && m < p.size(); ++m)
      out.stmts[m].rhs = substitute_var(out.stmts[m].rhs, old, with);
    return finish(std::move(out), limits);
  }
  default:
    return Failure::IllegalPattern;
  }
}

} // namespace

ApplyOutcome apply(const RewriteRule &rule, const Program &p,
                   const Limits &limits) {
  if (!rule.well_formed())
    return Failure::IllegalPattern;
  if (rule.stm < 1 || static_cast<std::size_t>(rule.stm) > p.size())
    return Failure::BadAddress;
  std::size_t k = static_cast<std::size_t>(rule.stm - 1);
  if (is_statement_rule(rule.name))
    return apply_statement_rule(rule, p, k, limits);

  const Expr *node = resolve(p.stmts[k].rhs, *rule.path);
  if (!node)
    return Failure::BadAddress;
  Local local = rewrite_node(rule.name, *node);
  if (auto *f = std::get_if<Failure>(&local))
    return *f;
  Program out = p;
  *resolve(out.stmts[k].rhs, *rule.path) = std::get<Expr>(std::move(local));
  return finish(std::move(out), limits);
}

std::vector<std::pair<RewriteRule, Program>>
enumerate_successors(const Program &p, const Limits &limits) {
  std::vector<std::pair<RewriteRule, Program>> out;
  auto used = used_vars(p);
  auto try_rule = [&](const RewriteRule &r) {
    ApplyOutcome res = apply(r, p, limits);
    if (res)
      out.emplace_back(r, std::move(res).program());
  };
  for (std::size_t k = 0; k < p.size(); ++k) {
    int stm = static_cast<int>(k + 1);
    const Stmt &stmt = p.stmts[k];
    std::vector<NodePath> paths = addressable_paths(stmt.rhs);
    for (RuleName name : all_rules()) {
      switch (rule_operands(name)) {
      case Operands::None:
        try_rule({stm, name, {}, {}});
        break;
      case Operands::Var:
        for (int d = 0; d < kVocabVars; ++d) {
          VarId v = VarId::from_dense(d);
          // Every Var-operand rule needs `v` to occur in the program and
          // share a type with something it touches; unused tokens of the
          // wrong type are rejected by apply() anyway.
          if (name != RuleName::Rename && !used[d])
            continue;
          if (name == RuleName::Rename && v.type != stmt.target.type)
            continue;
          try_rule({stm, name, {}, v});
        }
        break;
      case Operands::Node:
        for (const NodePath &path : paths)
          try_rule({stm, name, path, {}});
        break;
      case Operands::NodeVar:
        for (const NodePath &path : paths) {
          Type t = resolve(stmt.rhs, path)->type();
          for (int d = 0; d < kVocabVars; ++d) {
            VarId v = VarId::from_dense(d);
            if (used[d] || v.type != t)
              continue;
            try_rule({stm, name, path, v});
          }
        }
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  return out;
}

std::vector<RewriteRule> enumerate_legal(const Program &p, const Limits &limits) {
  std::vector<RewriteRule> out;
  for (auto &[rule, prog] : enumerate_successors(p, limits))
    out.push_back(rule);
  return out;
}

} // namespace progeq
