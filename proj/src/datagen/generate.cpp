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

#include "progeq/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "progeq/eval.hpp"
#include "progeq/rewrite.hpp"

namespace progeq {

std::string_view provenance_name(Provenance p) {
  switch (p) {
  case Provenance::Synthetic:
    return "Synthetic";
  case Provenance::Compiled:
    return "Compiled";
  case Provenance::Mined:
    return "Mined";
  }
  return "?";
}

std::optional<Provenance> provenance_from(std::string_view s) {
  for (auto p : {Provenance::Synthetic, Provenance::Compiled, Provenance::Mined})
    if (provenance_name(p) == s)
      return p;
  return std::nullopt;
}

GenConfig GenConfig::standard() {
  GenConfig c;
  c.statement_weights = {0, 5, 5, 5, 5, 4, 4, 3, 3, 2, 2, 1, 1};
  c.depth_weights = {0, 1, 4, 6, 5, 3, 2};
  c.scalar_op_weights = {0.7, 2, 0.9, 1.5, 0.8};
  c.vector_op_weights = {0.7, 2, 0.8, 2};
  c.function_prob = 0.25;
  c.intensity_mu = -1.1;
  c.intensity_sigma = 1.2;
  c.set_rule_prob(RuleName::Commute, 0.09);
  c.set_rule_prob(RuleName::FactorLeft, 0.65);
  c.set_rule_prob(RuleName::FactorRight, 0.65);
  c.set_rule_prob(RuleName::AddZero, 0.004);
  c.set_rule_prob(RuleName::SubZero, 0.004);
  c.set_rule_prob(RuleName::MultOne, 0.004);
  c.set_rule_prob(RuleName::DivOne, 0.004);
  c.set_rule_prob(RuleName::NeutralOp, 0.3);
  c.set_rule_prob(RuleName::Cancel, 0.3);
  c.set_rule_prob(RuleName::DoubleOp, 0.3);
  c.set_rule_prob(RuleName::AbsorbOp, 0.3);
  c.set_rule_prob(RuleName::DistributeLeft, 0.05);
  c.set_rule_prob(RuleName::DistributeRight, 0.05);
  c.set_rule_prob(RuleName::AssociativeLeft, 0.05);
  c.set_rule_prob(RuleName::AssociativeRight, 0.05);
  c.set_rule_prob(RuleName::FlipLeft, 0.2);
  c.set_rule_prob(RuleName::FlipRight, 0.2);
  c.set_rule_prob(RuleName::SwapPrev, 0.03);
  c.set_rule_prob(RuleName::DeleteStm, 0.2);
  c.set_rule_prob(RuleName::UseVar, 0.2);
  c.set_rule_prob(RuleName::Inline, 0.02);
  c.set_rule_prob(RuleName::NewTmp, 0.01);
  c.set_rule_prob(RuleName::Rename, 0.01);
  return c;
}

GenConfig GenConfig::small() {
  GenConfig c = standard();
  c.statement_weights = {0, 4, 4, 3, 2};
  c.depth_weights = {0, 1, 4, 4, 1};
  return c;
}

GenConfig GenConfig::generalization() {
  GenConfig c = standard();
  c.limits = Limits::generalization();
  c.statement_weights = {0, 0, 0, 1, 2, 3, 4, 5, 5, 5, 4, 4, 3, 3, 2, 2, 1, 1};
  c.depth_weights = {0, 0, 1, 3, 6, 6, 4};
  c.fixed_outputs = 3;
  c.min_nodes = 101;
  c.max_retries = 5000;
  return c;
}

std::optional<std::string> GenConfig::validate() const {
  auto weights_ok = [](const std::vector<double> &w) {
    if (w.size() < 2)
      return false;
    double sum = 0;
    for (double x : w) {
      if (!(x >= 0))
        return false;
      sum += x;
    }
    return sum > w[0];
  };
  if (!weights_ok(statement_weights))
    return "statement_weights needs a positive weight at index >= 1";
  if (!weights_ok(depth_weights))
    return "depth_weights needs a positive weight at index >= 1";
  if (depth_weights.size() > static_cast<std::size_t>(limits.max_depth) + 1)
    return "depth_weights exceeds the depth limit";
  for (double p : {two_outputs_prob, vector_output_prob, late_definition_prob, leaf_prob,
                   constant_prob, reuse_var_prob, function_prob, vector_subexpr_prob,
                   duplicate_prob, copy_subtree_prob})
    if (!(p >= 0 && p <= 1))
      return "probabilities must lie in [0, 1]";
  for (RuleName r : all_rules())
    if (!(prob(r) >= 0 && prob(r) <= 1))
      return "rule probability for " + std::string(rule_name_str(r)) + " outside [0, 1]";
  if (fixed_outputs < 0 || fixed_outputs > limits.max_outputs)
    return "fixed_outputs outside [0, max_outputs]";
  if (min_steps < 0)
    return "min_steps must be >= 0";
  if (passes < 0 || max_retries < 1)
    return "passes must be >= 0 and max_retries >= 1";
  auto op_weights_ok = [](const auto &w) {
    double sum = 0;
    for (double x : w) {
      if (!(x >= 0))
        return false;
      sum += x;
    }
    return sum > 0;
  };
  if (!op_weights_ok(scalar_op_weights) || !op_weights_ok(vector_op_weights))
    return "operator weights must be non-negative and not all zero";
  if (!(intensity_sigma >= 0))
    return "intensity_sigma must be >= 0";
  return std::nullopt;
}

namespace {

std::size_t pick_weighted(Rng &rng, const std::vector<double> &w) {
  std::vector<double> tail(w.begin() + 1, w.end());
  return 1 + std::discrete_distribution<std::size_t>(tail.begin(), tail.end())(rng);
}

template <class T> const T &pick(Rng &rng, const std::vector<T> &v) {
  return v[pick_index(rng, v.size())];
}

const Op kScalarFuncs[] = {Op::F1s, Op::F2s, Op::F3s, Op::F4s, Op::F5s};
const Op kScalarVecFuncs[] = {Op::G1s, Op::G2s, Op::G3s};
const Op kVectorFuncs[] = {Op::F1v, Op::F2v, Op::F3v, Op::F4v, Op::F5v};
const Op kVectorVecFuncs[] = {Op::G1v, Op::G2v, Op::G3v};

class Builder {
public:
  Builder(const GenConfig &cfg, Rng &rng) : cfg_(cfg), rng_(rng) {}

  Program build() {
    std::size_t target = pick_weighted(rng_, cfg_.statement_weights);
    int outputs = target >= 2 && coin(rng_, cfg_.two_outputs_prob) ? 2 : 1;
    if (cfg_.fixed_outputs > 0) {
      outputs = cfg_.fixed_outputs;
      target = std::max(target, static_cast<std::size_t>(outputs));
    }
    for (int i = 0; i < outputs; ++i) {
      Type t = coin(rng_, cfg_.vector_output_prob) ? Type::Vector : Type::Scalar;
      auto v = fresh(t);
      if (!v)
        v = fresh(t = Type::Scalar);
      assigned_[v->dense()] = true;
      Expr rhs = statement_rhs(t);
      stmts_.push_back({*v, true, std::move(rhs)});
    }
    while (stmts_.size() < target) {
      std::vector<VarId> pending;
      for (int d = 0; d < kVocabVars; ++d)
        if (read_[d] && !assigned_[d])
          pending.push_back(VarId::from_dense(d));
      if (pending.empty())
        break;
      define(pick(rng_, pending));
    }
    return Program{std::move(stmts_)};
  }

private:
  // Adds `v = ...` somewhere before the first statement reading v.
  void define(VarId v) {
    std::size_t first = 0;
    while (!reads_var(stmts_[first].rhs, v))
      ++first;
    std::size_t pos = coin(rng_, cfg_.late_definition_prob)
                          ? first
                          : pick_index(rng_, first + 1);
    assigned_[v.dense()] = true;
    std::optional<Expr> rhs;
    if (coin(rng_, cfg_.copy_subtree_prob))
      rhs = copy_subtree(v, pos);
    if (!rhs)
      rhs = statement_rhs(v.type);
    stmts_.insert(stmts_.begin() + static_cast<std::ptrdiff_t>(pos),
                  Stmt{v, false, std::move(*rhs)});
  }

  // A non-leaf subtree of a later statement that reads only inputs, so that
  // defining v with it leaves a UseVar opportunity behind.
  std::optional<Expr> copy_subtree(VarId v, std::size_t pos) {
    std::vector<const Expr *> found;
    for (std::size_t k = pos; k < stmts_.size(); ++k)
      collect_candidates(stmts_[k].rhs, v, found);
    if (found.empty())
      return std::nullopt;
    return *pick(rng_, found);
  }

  void collect_candidates(const Expr &e, VarId v, std::vector<const Expr *> &out) {
    if (e.is_leaf())
      return;
    if (e.type() == v.type && reads_only_inputs(e))
      out.push_back(&e);
    for (const Expr &a : e.args)
      collect_candidates(a, v, out);
  }

  bool reads_only_inputs(const Expr &e) const {
    if (e.is_var())
      return !assigned_[e.var.dense()];
    return std::all_of(e.args.begin(), e.args.end(),
                       [&](const Expr &a) { return reads_only_inputs(a); });
  }

  Expr statement_rhs(Type t) {
    int depth = static_cast<int>(pick_weighted(rng_, cfg_.depth_weights));
    return gen(t, depth, true);
  }

  std::optional<VarId> fresh(Type t) {
    int n = t == Type::Scalar ? kMaxScalarVars : kMaxVectorVars;
    n = std::min(n, t == Type::Scalar ? cfg_.limits.max_scalar_vars : n);
    std::vector<VarId> free;
    for (int i = 1; i <= n; ++i) {
      VarId v{t, static_cast<std::uint8_t>(i)};
      if (!read_[v.dense()] && !assigned_[v.dense()])
        free.push_back(v);
    }
    if (free.empty())
      return std::nullopt;
    return pick(rng_, free);
  }

  Expr leaf(Type t) {
    if (coin(rng_, cfg_.constant_prob)) {
      // Divisors never get a zero constant.
      if (t == Type::Vector)
        return Expr::constant(Op::ZeroV);
      return Expr::constant(divisor_ == 0 && coin(rng_, 0.5) ? Op::ZeroS : Op::OneS);
    }
    std::vector<VarId> inputs;
    for (int d = 0; d < kVocabVars; ++d) {
      VarId v = VarId::from_dense(d);
      if (v.type == t && read_[d] && !assigned_[d])
        inputs.push_back(v);
    }
    std::optional<VarId> v;
    if (!inputs.empty() && coin(rng_, cfg_.reuse_var_prob))
      v = pick(rng_, inputs);
    if (!v)
      v = fresh(t);
    if (!v && !inputs.empty())
      v = pick(rng_, inputs);
    if (!v)
      return Expr::constant(t == Type::Vector ? Op::ZeroV : Op::OneS);
    read_[v->dense()] = true;
    return Expr::variable(*v);
  }

  Expr gen(Type t, int remaining, bool top = false) {
    if (remaining <= 1 || (!top && coin(rng_, cfg_.leaf_prob)))
      return leaf(t);
    int sub = remaining - 1;
    if (coin(rng_, cfg_.function_prob))
      return function(t, sub);
    Op op;
    if (t == Type::Scalar) {
      static const Op ops[] = {Op::AddS, Op::SubS, Op::MulS, Op::DivS, Op::NegS};
      const auto &w = cfg_.scalar_op_weights;
      op = ops[std::discrete_distribution<int>(w.begin(), w.end())(rng_)];
    } else {
      static const Op ops[] = {Op::AddV, Op::SubV, Op::NegV, Op::MulSV};
      const auto &w = cfg_.vector_op_weights;
      op = ops[std::discrete_distribution<int>(w.begin(), w.end())(rng_)];
    }
    const OpInfo &info = op_info(op);
    if (info.arity == 1)
      return Expr::unary(op, gen(info.args[0], sub));
    if (sub >= 2 && coin(rng_, cfg_.duplicate_prob)) {
      if (auto e = duplicate_shape(op, sub))
        return *e;
    }
    Expr a = gen(info.args[0], sub);
    divisor_ += op == Op::DivS;
    Expr b = gen(info.args[1], sub);
    divisor_ -= op == Op::DivS;
    return Expr::binary(op, std::move(a), std::move(b));
  }

  // Subtrees that give Cancel and Factor rules something to match.
  std::optional<Expr> duplicate_shape(Op op, int sub) {
    if ((op == Op::SubS || op == Op::SubV) && divisor_ > 0)
      return std::nullopt;
    if (op == Op::SubS || op == Op::SubV || op == Op::DivS) {
      Expr a = gen(op_info(op).args[0], sub);
      return Expr::binary(op, a, a);
    }
    if (sub < 2 || !(op == Op::AddS || op == Op::SubS || op == Op::AddV || op == Op::SubV))
      return std::nullopt;
    bool vec = op == Op::AddV || op == Op::SubV;
    Op prod = vec ? Op::MulSV : (coin(rng_, 0.75) ? Op::MulS : Op::DivS);
    Type right = vec ? Type::Vector : Type::Scalar;
    if (prod == Op::MulS && coin(rng_, 0.5)) {
      // common left factor
      Expr a = gen(Type::Scalar, sub - 1);
      return Expr::binary(op, Expr::binary(prod, a, gen(right, sub - 1)),
                          Expr::binary(prod, a, gen(right, sub - 1)));
    }
    if (prod == Op::MulSV && coin(rng_, 0.5)) {
      Expr a = gen(Type::Scalar, sub - 1);
      return Expr::binary(op, Expr::binary(prod, a, gen(right, sub - 1)),
                          Expr::binary(prod, a, gen(right, sub - 1)));
    }
    divisor_ += prod == Op::DivS;
    Expr c = gen(right, sub - 1);
    divisor_ -= prod == Op::DivS;
    return Expr::binary(op, Expr::binary(prod, gen(Type::Scalar, sub - 1), c),
                        Expr::binary(prod, gen(Type::Scalar, sub - 1), c));
  }

  Expr function(Type t, int sub) {
    bool vec_args = coin(rng_, cfg_.vector_subexpr_prob);
    if (t == Type::Scalar) {
      if (vec_args)
        return Expr::unary(kScalarVecFuncs[pick_index(rng_, 3)], gen(Type::Vector, sub));
      Op f = kScalarFuncs[pick_index(rng_, 5)];
      Expr a = gen(Type::Scalar, sub);
      return Expr::binary(f, std::move(a), gen(Type::Scalar, sub));
    }
    if (vec_args) {
      Op f = kVectorVecFuncs[pick_index(rng_, 3)];
      Expr a = gen(Type::Vector, sub);
      return Expr::binary(f, std::move(a), gen(Type::Vector, sub));
    }
    Op f = kVectorFuncs[pick_index(rng_, 5)];
    Expr a = gen(Type::Scalar, sub);
    return Expr::binary(f, std::move(a), gen(Type::Scalar, sub));
  }

  const GenConfig &cfg_;
  Rng &rng_;
  std::vector<Stmt> stmts_;
  std::array<bool, kVocabVars> assigned_{};
  std::array<bool, kVocabVars> read_{};
  int divisor_ = 0; // > 0 while generating the right operand of /s
};

bool scaled_rule(RuleName r) {
  return r != RuleName::Commute && r != RuleName::FactorLeft && r != RuleName::FactorRight;
}

constexpr RuleName kStatementRules[] = {RuleName::SwapPrev, RuleName::DeleteStm,
                                        RuleName::UseVar,   RuleName::Inline,
                                        RuleName::NewTmp,   RuleName::Rename};

std::vector<RuleName> node_rules() {
  std::vector<RuleName> out;
  for (RuleName r : all_rules())
    if (!is_statement_rule(r))
      out.push_back(r);
  return out;
}

class RulesPass {
public:
  RulesPass(const Program &p, const GenConfig &cfg, Rng &rng, double intensity)
      : cur_(p), cfg_(cfg), rng_(rng), intensity_(intensity) {}

  RulesResult run() {
    static const std::vector<RuleName> kNodeRules = node_rules();
    std::size_t k = 0;
    while (k < cur_.size()) {
      bool deleted = false;
      std::vector<RuleName> srules(std::begin(kStatementRules), std::end(kStatementRules));
      std::shuffle(srules.begin(), srules.end(), rng_);
      for (RuleName r : srules) {
        if (!coin(rng_, prob(r)))
          continue;
        if (!statement_rule(r, k))
          continue;
        if (r == RuleName::DeleteStm) {
          deleted = true;
          break;
        }
        if (r == RuleName::NewTmp)
          ++k;
      }
      if (deleted)
        continue;
      int stm = static_cast<int>(k + 1);
      std::vector<RuleName> nrules = kNodeRules;
      for (const NodePath &path : addressable_paths(cur_.stmts[k].rhs)) {
        if (!resolve(cur_.stmts[k].rhs, path))
          continue;
        std::shuffle(nrules.begin(), nrules.end(), rng_);
        for (RuleName r : nrules)
          if (coin(rng_, prob(r)) && attempt({stm, r, path, {}}))
            break;
      }
      ++k;
    }
    return {std::move(cur_), std::move(seq_)};
  }

private:
  double prob(RuleName r) const {
    double p = cfg_.prob(r);
    if (scaled_rule(r))
      p *= intensity_;
    return std::min(p, 1.0);
  }

  bool attempt(const RewriteRule &r) {
    ApplyOutcome out = apply(r, cur_, cfg_.limits);
    if (!out)
      return false;
    cur_ = std::move(out).program();
    seq_.push_back(r);
    return true;
  }

  bool attempt_any(int stm, RuleName name, std::vector<VarId> vars) {
    std::shuffle(vars.begin(), vars.end(), rng_);
    for (VarId v : vars)
      if (attempt({stm, name, {}, v}))
        return true;
    return false;
  }

  std::vector<VarId> unused_vars(Type t) const {
    auto used = used_vars(cur_);
    std::vector<VarId> out;
    for (int d = 0; d < kVocabVars; ++d) {
      VarId v = VarId::from_dense(d);
      if (!used[d] && v.type == t)
        out.push_back(v);
    }
    return out;
  }

  bool statement_rule(RuleName r, std::size_t k) {
    int stm = static_cast<int>(k + 1);
    const Stmt &s = cur_.stmts[k];
    switch (r) {
    case RuleName::SwapPrev:
    case RuleName::DeleteStm:
      return attempt({stm, r, {}, {}});
    case RuleName::UseVar: {
      std::vector<VarId> defs;
      for (std::size_t j = 0; j < k; ++j)
        if (std::find(defs.begin(), defs.end(), cur_.stmts[j].target) == defs.end())
          defs.push_back(cur_.stmts[j].target);
      return attempt_any(stm, r, defs);
    }
    case RuleName::Inline: {
      std::vector<VarId> reads;
      collect_vars(s.rhs, reads);
      std::vector<VarId> defined;
      for (VarId v : reads)
        for (std::size_t j = 0; j < k; ++j)
          if (cur_.stmts[j].target == v &&
              std::find(defined.begin(), defined.end(), v) == defined.end())
            defined.push_back(v);
      return attempt_any(stm, r, defined);
    }
    case RuleName::NewTmp: {
      auto paths = addressable_paths(s.rhs);
      NodePath path = pick(rng_, paths);
      auto vars = unused_vars(resolve(s.rhs, path)->type());
      if (vars.empty())
        return false;
      return attempt({stm, r, path, pick(rng_, vars)});
    }
    case RuleName::Rename: {
      auto vars = unused_vars(s.target.type);
      if (vars.empty())
        return false;
      return attempt({stm, r, {}, pick(rng_, vars)});
    }
    default:
      return false;
    }
  }

  Program cur_;
  const GenConfig &cfg_;
  Rng &rng_;
  double intensity_;
  std::vector<RewriteRule> seq_;
};

} // namespace

Program generate_prog_a(const GenConfig &cfg, std::uint64_t seed) {
  if (auto err = cfg.validate())
    throw GenerationError("invalid generator config: " + *err);
  Rng rng(seed);
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Program p = Builder(cfg, rng).build();
    // Also rejects programs that divide by zero on every input.
    if (!structural_error(p) && check_limits(p, cfg.limits).ok() &&
        p.node_count() >= cfg.min_nodes && semantically_agree(p, p, seed, 1).has_value())
      return p;
  }
  throw GenerationError("no program within limits after " +
                        std::to_string(cfg.max_retries) + " attempts (seed " +
                        std::to_string(seed) + ")");
}

RulesResult apply_random_rules(const Program &p, const GenConfig &cfg, Rng &rng,
                               double intensity) {
  return RulesPass(p, cfg, rng, intensity).run();
}

RulesResult apply_random_rules(const Program &p, const GenConfig &cfg,
                               std::uint64_t seed, double intensity) {
  Rng rng(seed);
  return apply_random_rules(p, cfg, rng, intensity);
}

Sample generate_pair(const GenConfig &cfg, std::uint64_t seed) {
  if (auto err = cfg.validate())
    throw GenerationError("invalid generator config: " + *err);
  Rng rng(seed);
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Program a;
    try {
      a = generate_prog_a(cfg, rng());
    } catch (const GenerationError &) {
      continue;
    }
    double intensity =
        std::exp(std::normal_distribution<double>(cfg.intensity_mu, cfg.intensity_sigma)(rng));
    Program b = a;
    std::vector<RewriteRule> seq;
    for (int pass = 0; pass < cfg.passes; ++pass) {
      RulesResult r = apply_random_rules(b, cfg, rng, intensity);
      b = std::move(r.program);
      seq.insert(seq.end(), r.seq.begin(), r.seq.end());
    }
    if (!check_limits(b, cfg.limits).ok() ||
        seq.size() < static_cast<std::size_t>(cfg.min_steps))
      continue;
    Sample s;
    s.id = "seed-" + std::to_string(seed);
    s.prog_a = std::move(a);
    s.prog_b = std::move(b);
    s.gen_seq = std::move(seq);
    s.provenance = Provenance::Synthetic;
    return s;
  }
  throw GenerationError("no pair within limits after " + std::to_string(cfg.max_retries) +
                        " attempts (seed " + std::to_string(seed) + ")");
}

std::vector<Sample> generate_corpus(const GenConfig &cfg, std::size_t count,
                                    std::string_view id_prefix, int jobs) {
  std::vector<Sample> out(count);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < count; i += stride) {
      out[i] = generate_pair(cfg, derive_seed(cfg.seed, i));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%06zu", i);
      out[i].id = std::string(id_prefix) + buf;
    }
  };
  std::size_t n = static_cast<std::size_t>(std::max(jobs, 1));
  if (n == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(n);
  for (std::size_t t = 0; t < n; ++t)
    threads.emplace_back([&, t] {
      try {
        work(t, n);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto &th : threads)
    th.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

} // namespace progeq
