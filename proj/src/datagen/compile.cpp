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
#include <set>
#include <sstream>

#include "progeq/rewrite.hpp"

namespace progeq {

namespace {

struct Site {
  std::size_t stm;
  NodePath path;
};

std::optional<VarId> first_unused(const Program &p, Type t, const Limits &limits) {
  auto used = used_vars(p);
  int n = t == Type::Scalar ? std::min(kMaxScalarVars, limits.max_scalar_vars)
                            : kMaxVectorVars;
  for (int i = 1; i <= n; ++i) {
    VarId v{t, static_cast<std::uint8_t>(i)};
    if (!used[v.dense()])
      return v;
  }
  return std::nullopt;
}

// Applies `r` to `p` in place when legal.
bool step(Program &p, std::vector<RewriteRule> &seq, const RewriteRule &r,
          const Limits &limits) {
  ApplyOutcome out = apply(r, p, limits);
  if (!out)
    return false;
  p = std::move(out).program();
  seq.push_back(r);
  return true;
}

// One round of CSE: the largest subtree occurring at least twice gets a
// temporary at its first occurrence and UseVar everywhere else it can.
bool cse_round(Program &p, std::vector<RewriteRule> &seq, const Limits &limits) {
  std::vector<std::pair<const Expr *, Site>> sites;
  for (std::size_t k = 0; k < p.size(); ++k)
    for (const NodePath &path : addressable_paths(p.stmts[k].rhs)) {
      const Expr *e = resolve(p.stmts[k].rhs, path);
      if (!e->is_leaf())
        sites.push_back({e, {k, path}});
    }
  std::vector<std::pair<int, std::size_t>> order; // (-size, site index)
  for (std::size_t i = 0; i < sites.size(); ++i) {
    int count = 0;
    for (const auto &other : sites)
      count += *other.first == *sites[i].first;
    if (count >= 2)
      order.push_back({-sites[i].first->node_count(), i});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::set<std::string> tried;
  for (const auto &[neg, idx] : order) {
    const Expr pattern = *sites[idx].first;
    if (!tried.insert(print_expr(pattern)).second)
      continue;
    const Site site = sites[idx].second;
    auto v = first_unused(p, pattern.type(), limits);
    if (!v)
      return false;
    Program trial = p;
    std::vector<RewriteRule> trial_seq;
    int stm = static_cast<int>(site.stm + 1);
    if (!step(trial, trial_seq, {stm, RuleName::NewTmp, site.path, *v}, limits))
      continue;
    bool used = false;
    for (std::size_t m = site.stm + 1; m < trial.size(); ++m)
      used |= step(trial, trial_seq, {static_cast<int>(m + 1), RuleName::UseVar, {}, *v},
                   limits);
    if (!used)
      continue;
    p = std::move(trial);
    seq.insert(seq.end(), trial_seq.begin(), trial_seq.end());
    return true;
  }
  return false;
}

constexpr RuleName kSimplify[] = {RuleName::Cancel, RuleName::AbsorbOp,
                                  RuleName::DoubleOp, RuleName::NeutralOp};

bool simplify_once(Program &p, std::vector<RewriteRule> &seq, const Limits &limits) {
  for (std::size_t k = 0; k < p.size(); ++k)
    for (const NodePath &path : addressable_paths(p.stmts[k].rhs))
      for (RuleName r : kSimplify)
        if (step(p, seq, {static_cast<int>(k + 1), r, path, {}}, limits))
          return true;
  return false;
}

bool delete_dead(Program &p, std::vector<RewriteRule> &seq, const Limits &limits) {
  for (std::size_t k = p.size(); k-- > 0;)
    if (step(p, seq, {static_cast<int>(k + 1), RuleName::DeleteStm, {}, {}}, limits))
      return true;
  return false;
}

// Copy statements `t = u` are propagated into their readers and removed.
bool propagate_copy(Program &p, std::vector<RewriteRule> &seq, const Limits &limits) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Stmt &s = p.stmts[k];
    if (s.is_output || !s.rhs.is_var())
      continue;
    VarId t = s.target;
    Program trial = p;
    std::vector<RewriteRule> trial_seq;
    bool ok = true;
    for (std::size_t m = k + 1; m < trial.size() && ok; ++m) {
      if (reads_var(trial.stmts[m].rhs, t))
        ok = step(trial, trial_seq, {static_cast<int>(m + 1), RuleName::Inline, {}, t},
                  limits);
      if (trial.stmts[m].target == t)
        break;
    }
    if (ok && step(trial, trial_seq, {static_cast<int>(k + 1), RuleName::DeleteStm, {}, {}},
                   limits)) {
      p = std::move(trial);
      seq.insert(seq.end(), trial_seq.begin(), trial_seq.end());
      return true;
    }
  }
  return false;
}

bool is_temp_candidate(const Program &p, std::size_t k, VarId v) {
  // v was assigned before k and is no longer needed there.
  for (std::size_t j = 0; j < k; ++j)
    if (p.stmts[j].target == v)
      return true;
  return false;
}

} // namespace

std::vector<RewriteRule> cse_pass(const Program &p) {
  Program cur = p;
  std::vector<RewriteRule> seq;
  Limits limits{};
  while (cse_round(cur, seq, limits)) {
  }
  return seq;
}

std::vector<RewriteRule> strength_pass(const Program &p) {
  Program cur = p;
  std::vector<RewriteRule> seq;
  Limits limits{};
  while (simplify_once(cur, seq, limits)) {
  }
  return seq;
}

std::vector<RewriteRule> reuse_pass(const Program &p) {
  Program cur = p;
  std::vector<RewriteRule> seq;
  Limits limits{};
  while (propagate_copy(cur, seq, limits) || delete_dead(cur, seq, limits)) {
  }
  // Give each temporary the lowest-numbered dead name available.
  for (std::size_t k = 0; k < cur.size(); ++k) {
    const Stmt &s = cur.stmts[k];
    if (s.is_output)
      continue;
    int stm = static_cast<int>(k + 1);
    std::vector<VarId> names;
    for (std::size_t j = 0; j < k; ++j) {
      VarId v = cur.stmts[j].target;
      if (v.type == s.target.type && v < s.target && is_temp_candidate(cur, k, v) &&
          std::find(names.begin(), names.end(), v) == names.end())
        names.push_back(v);
    }
    std::sort(names.begin(), names.end());
    for (VarId v : names)
      if (step(cur, seq, {stm, RuleName::Rename, {}, v}, limits))
        break;
  }
  return seq;
}

Sample rename_sample(const Sample &s, const Renaming &ren) {
  Sample out = s;
  out.prog_a = rename_program(s.prog_a, ren);
  out.prog_b = rename_program(s.prog_b, ren);
  if (out.gen_seq)
    for (RewriteRule &r : *out.gen_seq)
      if (r.var && ren[r.var->dense()])
        r.var = ren[r.var->dense()];
  return out;
}

CompiledChain compile_chain(const Program &p, const GenConfig &cfg, std::uint64_t seed) {
  CompiledChain chain;
  chain.stages.push_back(p);
  auto add_stage = [&](const char *name, std::vector<RewriteRule> seq) {
    if (seq.empty())
      return;
    Program cur = chain.stages.back();
    for (const RewriteRule &r : seq)
      cur = apply(r, cur, Limits::unlimited()).program();
    chain.stages.push_back(std::move(cur));
    chain.steps.push_back(std::move(seq));
    chain.stage_names.emplace_back(name);
  };
  add_stage("cse", cse_pass(chain.stages.back()));
  add_stage("strength", strength_pass(chain.stages.back()));
  add_stage("reuse", reuse_pass(chain.stages.back()));

  Rng rng(seed);
  double intensity =
      std::exp(std::normal_distribution<double>(cfg.intensity_mu, cfg.intensity_sigma)(rng));
  Program b = chain.stages.back();
  std::vector<RewriteRule> seq;
  for (int pass = 0; pass < cfg.passes; ++pass) {
    RulesResult r = apply_random_rules(b, cfg, rng, intensity);
    b = std::move(r.program);
    seq.insert(seq.end(), r.seq.begin(), r.seq.end());
  }
  if (check_limits(b, cfg.limits).ok())
    add_stage("rules", std::move(seq));
  return chain;
}

std::vector<Sample> compile_pairs(const Program &p, const GenConfig &cfg,
                                  std::uint64_t seed, std::string_view id_prefix) {
  CompiledChain chain = compile_chain(p, cfg, seed);
  std::vector<Sample> out;
  auto emit = [&](std::size_t from, std::size_t to) {
    Sample s;
    s.prog_a = chain.stages[from];
    s.prog_b = chain.stages[to];
    s.provenance = Provenance::Compiled;
    if (from < to) {
      std::vector<RewriteRule> seq;
      for (std::size_t i = from; i < to; ++i)
        seq.insert(seq.end(), chain.steps[i].begin(), chain.steps[i].end());
      s.gen_seq = std::move(seq);
    }
    std::uint64_t pair_seed = derive_seed(seed, out.size() + 1);
    s = rename_sample(s, random_permutation(pair_seed));
    s.id = std::string(id_prefix) + "-" + std::to_string(out.size());
    out.push_back(std::move(s));
  };
  std::size_t last = chain.stages.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    emit(i, i + 1);
    emit(i + 1, i);
  }
  if (last >= 2) {
    emit(0, last);
    emit(last, 0);
  }
  return out;
}

namespace {

bool has_mul_or_div(const Expr &e) {
  if (e.op == Op::MulS || e.op == Op::DivS || e.op == Op::MulSV)
    return true;
  return std::any_of(e.args.begin(), e.args.end(), has_mul_or_div);
}

// Some non-output assignment whose value reaches an output.
bool temp_feeds_output(const Program &p) {
  std::array<bool, kVocabVars> live{};
  for (std::size_t k = p.size(); k-- > 0;) {
    const Stmt &s = p.stmts[k];
    bool needed = s.is_output || live[s.target.dense()];
    if (!s.is_output && live[s.target.dense()])
      return true;
    live[s.target.dense()] = false;
    if (needed) {
      std::vector<VarId> reads;
      collect_vars(s.rhs, reads);
      for (VarId v : reads)
        live[v.dense()] = true;
    }
  }
  return false;
}

} // namespace

SourceScan find_source_programs(std::string_view corpus, const Limits &limits) {
  SourceScan scan;
  std::set<std::string> seen;
  std::istringstream in{std::string(corpus)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_tokens(line);
    if (toks.empty() || toks[0].starts_with("#"))
      continue;
    Program p;
    try {
      p = parse_normalized_source(line, limits);
    } catch (const ParseError &e) {
      scan.errors.push_back({lineno, e.what()});
      continue;
    }
    bool mul = std::any_of(p.stmts.begin(), p.stmts.end(),
                           [](const Stmt &s) { return has_mul_or_div(s.rhs); });
    if (p.size() < 2 || !mul || !temp_feeds_output(p)) {
      ++scan.rejected;
      continue;
    }
    if (!seen.insert(print_prefix(p)).second) {
      ++scan.duplicates;
      continue;
    }
    scan.accepted.push_back({lineno, std::move(p)});
  }
  return scan;
}

} // namespace progeq
